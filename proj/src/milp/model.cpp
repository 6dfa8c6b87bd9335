#include "rruc/milp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rruc/error.hpp"

namespace rruc::milp {

LinearExpr& LinearExpr::operator+=(const LinearExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& other) {
  for (const auto& t : other.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= other.constant_;
  return *this;
}

LinearExpr& LinearExpr::operator*=(double k) {
  for (auto& t : terms_) t.coef *= k;
  constant_ *= k;
  return *this;
}

double LinearExpr::evaluate(const std::vector<double>& values) const {
  double v = constant_;
  for (const auto& t : terms_) v += t.coef * values.at(t.var.index);
  return v;
}

LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
LinearExpr operator*(double k, LinearExpr a) { return a *= k; }

VarId Model::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (std::isnan(lower) || std::isnan(upper))
    throw ModelError("variable '" + name + "': NaN bound");
  if (lower > upper) throw ModelError("variable '" + name + "': lower bound exceeds upper bound");
  variables_.push_back({std::move(name), kind, lower, upper});
  return VarId{static_cast<std::uint32_t>(variables_.size() - 1)};
}

void Model::check_expr(const LinearExpr& e, const std::string& where) const {
  if (std::isnan(e.constant())) throw ModelError(where + ": NaN constant");
  for (const auto& t : e.terms()) {
    if (t.var.index >= variables_.size()) throw ModelError(where + ": unknown variable");
    if (!std::isfinite(t.coef)) throw ModelError(where + ": non-finite coefficient");
  }
}

void Model::add_constraint(std::string name, LinearExpr expr, double lower, double upper) {
  check_expr(expr, "constraint '" + name + "'");
  if (std::isnan(lower) || std::isnan(upper)) throw ModelError("constraint '" + name + "': NaN bound");
  constraints_.push_back({std::move(name), std::move(expr), lower, upper});
}

void Model::set_objective(Sense sense, LinearExpr objective) {
  check_expr(objective, "objective");
  sense_ = sense;
  objective_ = std::move(objective);
}

void Model::fix(VarId v, double value) { set_bounds(v, value, value); }

void Model::set_bounds(VarId v, double lower, double upper) {
  if (v.index >= variables_.size()) throw ModelError("set_bounds: unknown variable");
  if (std::isnan(lower) || std::isnan(upper) || lower > upper)
    throw ModelError("set_bounds: invalid bounds for '" + variables_[v.index].name + "'");
  variables_[v.index].lower = lower;
  variables_[v.index].upper = upper;
}

std::size_t Model::num_binaries() const {
  return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(),
                                                [](const Variable& v) { return v.kind == VarKind::binary; }));
}

namespace {

void write_expr(std::ostream& os, const Model& m, const LinearExpr& e) {
  bool first = true;
  for (const auto& t : e.terms()) {
    os << (t.coef < 0 ? " - " : (first ? " " : " + ")) << std::abs(t.coef) << ' '
       << m.variable(t.var).name;
    first = false;
  }
  if (first) os << " 0";
}

}  // namespace

std::string Model::to_lp_text() const {
  std::ostringstream os;
  os.precision(17);
  os << (sense_ == Sense::minimize ? "Minimize" : "Maximize") << "\n obj:";
  write_expr(os, *this, objective_);
  if (objective_.constant() != 0.0) os << " + " << objective_.constant() << " constant";
  os << "\nSubject To\n";
  for (const auto& c : constraints_) {
    const double shift = c.expr.constant();
    os << ' ' << c.name << ':';
    if (c.lower == c.upper) {
      write_expr(os, *this, c.expr);
      os << " = " << c.upper - shift << '\n';
      continue;
    }
    if (c.lower > -kInf) {
      write_expr(os, *this, c.expr);
      os << " >= " << c.lower - shift << '\n';
      if (c.upper < kInf) os << ' ' << c.name << "_ub:";
    }
    if (c.upper < kInf) {
      write_expr(os, *this, c.expr);
      os << " <= " << c.upper - shift << '\n';
    }
  }
  os << "Bounds\n";
  for (const auto& v : variables_) {
    if (v.kind == VarKind::binary) continue;
    os << ' ';
    if (v.lower == -kInf) os << "-inf"; else os << v.lower;
    os << " <= " << v.name << " <= ";
    if (v.upper == kInf) os << "inf"; else os << v.upper;
    os << '\n';
  }
  os << "Binaries\n";
  for (const auto& v : variables_)
    if (v.kind == VarKind::binary) os << ' ' << v.name << '\n';
  os << "End\n";
  return os.str();
}

Model build(const std::vector<VariableSpec>& variables, const std::vector<Constraint>& constraints,
            Sense sense, const LinearExpr& objective) {
  Model m;
  for (const auto& v : variables) m.add_variable(v.name, v.kind, v.lower, v.upper);
  for (const auto& c : constraints) m.add_constraint(c.name, c.expr, c.lower, c.upper);
  m.set_objective(sense, objective);
  return m;
}

}  // namespace rruc::milp
