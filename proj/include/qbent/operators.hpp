#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "qbent/sampling.hpp"
#include "qbent/spaces.hpp"

namespace qbent {

enum class OperatorForm { Dense, Embedding, TildeT, SharpT, T0, Tinf, ProjectionP, InjectionJ };

std::string form_name(OperatorForm f);

struct StructuredParams {
  GammaExponent gamma{};
  double p = 1.0;
  std::size_t section_dim = 1;
  std::size_t ambient_dim = 0;
};

/// P with P·T = I_Z, used for the antipodal lower bound e_k(T) >= e_k(I_Z)/‖P‖.
struct LeftInverse {
  double norm_upper = 1.0;
  SpaceSpec z;
};

class LinearOperator {
 public:
  LinearOperator(OperatorForm form, Eigen::MatrixXd matrix, SpaceSpec source, SpaceSpec target,
                 StructuredParams params = {});
  static LinearOperator dense(Eigen::MatrixXd matrix, SpaceSpec source, SpaceSpec target);

  OperatorForm form() const { return form_; }
  const SpaceSpec& source() const { return source_; }
  const SpaceSpec& target() const { return target_; }
  const Eigen::MatrixXd& matrix() const { return m_; }
  const StructuredParams& params() const { return params_; }
  double scale() const { return scale_; }
  std::size_t source_dim() const { return source_.dim(); }
  std::size_t target_dim() const { return target_.dim(); }

  Vec apply(VecView x) const;
  void apply_into(VecView x, std::span<double> out) const;
  Vec column(std::size_t j) const;
  bool is_zero() const;

  LinearOperator scaled(double s) const;
  std::optional<double> closed_form_norm() const;
  std::optional<LeftInverse> left_inverse() const;

 private:
  OperatorForm form_;
  Eigen::MatrixXd m_;
  SpaceSpec source_;
  SpaceSpec target_;
  StructuredParams params_;
  double scale_ = 1.0;
};

/// outer ∘ inner, materialised as a dense operator.
LinearOperator compose(const LinearOperator& outer, const LinearOperator& inner);
LinearOperator add(const LinearOperator& a, const LinearOperator& b);

LinearOperator make_embedding(const SpaceSpec& x, const SpaceSpec& y);
/// Structured operators. TildeT: R -> (R^2, ω), x ↦ (0, x). SharpT:
/// ℓ_p^m -> (R × ℓ_p^m, ϑ), x ↦ (0, x). T0 and Tinf: ℓ_1^m -> (R × ℓ_∞^m, ϑ),
/// x ↦ (0, x), with T0's target restricted to {0} × ℓ_∞^m. ProjectionP:
/// ℓ_p^ambient -> ℓ_p^m keeps the first m coordinates; InjectionJ pads with
/// zeros. ambient_dim = 0 means 2m.
LinearOperator make_structured_operator(OperatorForm tag, GammaExponent g, double p, std::size_t section_dim,
                                   std::size_t ambient_dim = 0);
/// (ξ, x) ↦ x from (R × ℓ_p^m, ϑ) to ℓ_p^m.
LinearOperator make_theta_projection(GammaExponent g, double p, std::size_t m);

/// Plain-text matrix: a `rows cols` header line, then rows of decimals.
Eigen::MatrixXd parse_matrix(std::istream& in);

/// sup ‖T t‖_Y over |t_j| <= h_j.
double image_box_radius(const LinearOperator& t, VecView h);

struct NormBudget {
  int starts = 64;
  int iterations = 200;
  double step_decay = 0.7;
  double net_delta = 0.0;  // > 0 adds the lattice-net bound (dims <= 6)
  std::size_t net_points = 200000;
  std::size_t max_cells = 100000;
  double rel_tol = 1e-6;
};

struct OperatorNormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  std::string method;
  bool converged = true;
};

OperatorNormEstimate operator_norm_bounds(const LinearOperator& t, const NormBudget& budget, std::uint64_t seed);

}  // namespace qbent
