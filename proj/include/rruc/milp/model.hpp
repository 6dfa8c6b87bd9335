#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace rruc::milp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind : std::uint8_t { continuous, binary };
enum class Sense : std::uint8_t { minimize, maximize };

/// Handle to a variable registered in a Model.
struct VarId {
  std::uint32_t index = 0;
  bool operator==(const VarId&) const = default;
};

struct Term {
  VarId var;
  double coef = 0.0;
};

/// Affine expression Σ coef·var + constant.
class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(double constant) : constant_(constant) {}  // NOLINT(google-explicit-constructor)
  LinearExpr(VarId v, double coef = 1.0) { add(v, coef); }  // NOLINT

  LinearExpr& add(VarId v, double coef) {
    if (coef != 0.0) terms_.push_back({v, coef});
    return *this;
  }
  LinearExpr& add(double c) {
    constant_ += c;
    return *this;
  }
  LinearExpr& operator+=(const LinearExpr& other);
  LinearExpr& operator-=(const LinearExpr& other);
  LinearExpr& operator*=(double k);

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] double constant() const { return constant_; }
  /// Value at a point given as one value per model variable.
  [[nodiscard]] double evaluate(const std::vector<double>& values) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinearExpr operator+(LinearExpr a, const LinearExpr& b);
LinearExpr operator-(LinearExpr a, const LinearExpr& b);
LinearExpr operator*(double k, LinearExpr a);

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;
};

/// lower <= expr <= upper; the expression's constant is folded into the bounds
/// when the model is handed to a backend.
struct Constraint {
  std::string name;
  LinearExpr expr;
  double lower = -kInf;
  double upper = kInf;
};

/// Backend-independent MILP. Variables and rows are append-only; a model is
/// rebuilt rather than edited between solves.
class Model {
 public:
  VarId add_variable(std::string name, VarKind kind, double lower, double upper);
  VarId add_continuous(std::string name, double lower, double upper) {
    return add_variable(std::move(name), VarKind::continuous, lower, upper);
  }
  VarId add_binary(std::string name) { return add_variable(std::move(name), VarKind::binary, 0, 1); }

  void add_constraint(std::string name, LinearExpr expr, double lower, double upper);
  void add_le(std::string name, LinearExpr expr, double rhs) {
    add_constraint(std::move(name), std::move(expr), -kInf, rhs);
  }
  void add_ge(std::string name, LinearExpr expr, double rhs) {
    add_constraint(std::move(name), std::move(expr), rhs, kInf);
  }
  void add_eq(std::string name, LinearExpr expr, double rhs) {
    add_constraint(std::move(name), std::move(expr), rhs, rhs);
  }

  void set_objective(Sense sense, LinearExpr objective);

  /// Tightens a variable's bounds (used to freeze first-stage decisions).
  void fix(VarId v, double value);
  void set_bounds(VarId v, double lower, double upper);

  [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
  [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }
  [[nodiscard]] const Variable& variable(VarId v) const { return variables_[v.index]; }
  [[nodiscard]] Sense sense() const { return sense_; }
  [[nodiscard]] const LinearExpr& objective() const { return objective_; }
  [[nodiscard]] std::size_t num_variables() const { return variables_.size(); }
  [[nodiscard]] std::size_t num_constraints() const { return constraints_.size(); }
  [[nodiscard]] std::size_t num_binaries() const;
  [[nodiscard]] bool is_mip() const { return num_binaries() > 0; }

  /// Human-readable LP-format text, for debugging dumps.
  [[nodiscard]] std::string to_lp_text() const;

 private:
  void check_expr(const LinearExpr& e, const std::string& where) const;

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  LinearExpr objective_;
  Sense sense_ = Sense::minimize;
};

struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInf;
};

/// Assembles a model from explicit parts, validating every reference.
Model build(const std::vector<VariableSpec>& variables, const std::vector<Constraint>& constraints,
            Sense sense, const LinearExpr& objective);

}  // namespace rruc::milp
