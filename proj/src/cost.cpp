#include "chainflow/cost.hpp"

namespace chainflow {

double CostFn::evaluate(double x) const {
  if (x < 0) throw ValidationError("cost evaluated at negative load");
  if (x == kInf) return kInf;
  switch (kind) {
    case Kind::Linear:
      return param * x;
    case Kind::Queue:
      if (x >= param) return kInf;
      return x / (param - x);
  }
  return kInf;
}

double CostFn::derivative(double x) const {
  if (x < 0) throw ValidationError("cost derivative at negative load");
  if (x == kInf) return kInf;
  switch (kind) {
    case Kind::Linear:
      return param;
    case Kind::Queue: {
      if (x >= param) return kInf;
      double d = param - x;
      return param / (d * d);
    }
  }
  return kInf;
}

double CostFn::second_derivative(double x) const {
  if (x < 0) throw ValidationError("cost second derivative at negative load");
  if (x == kInf) return kInf;
  switch (kind) {
    case Kind::Linear:
      return 0.0;
    case Kind::Queue: {
      if (x >= param) return kInf;
      double d = param - x;
      return 2.0 * param / (d * d * d);
    }
  }
  return kInf;
}

}  // namespace chainflow
