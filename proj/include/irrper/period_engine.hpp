#pragma once

// Assembly of period matrices by quadrature (rank 1 via tracked-branch
// weights, rank 2 via ODE transport of dual sections), the regularized
// approximation sequence with Richardson extrapolation, and the closed-form
// period assembly for the Legendre pipeline.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "irrper/connection.hpp"
#include "irrper/curve.hpp"
#include "irrper/gamma.hpp"
#include "irrper/path.hpp"
#include "irrper/product_formula.hpp"
#include "irrper/quadrature.hpp"
#include "irrper/scalar.hpp"
#include "irrper/transport.hpp"

namespace irrper {

enum class FormBasis { Eta, Omega };

template <class C>
struct PeriodMatrix {
  Mat<C> entries;
  C determinant{};
  real_t<C> det_error{};
  real_t<C> entry_error{};  // max per-entry error estimate
  long evaluations = 0;
  bool converged = true;
};

namespace detail {

template <class C>
void finish_period_matrix(PeriodMatrix<C>& pm, const Mat<C>& entry_errors) {
  using R = real_t<C>;
  pm.determinant = pm.entries.determinant();
  pm.entry_error = entry_errors.cwiseAbs().maxCoeff();
  // first-order determinant perturbation: |det| * sum |err_ij * (A^-1)_ji|
  Eigen::FullPivLU<Mat<C>> lu(pm.entries);
  if (lu.isInvertible()) {
    Mat<C> inv = lu.inverse();
    R acc(0);
    for (Eigen::Index i = 0; i < pm.entries.rows(); ++i)
      for (Eigen::Index j = 0; j < pm.entries.cols(); ++j)
        acc += entry_errors(i, j).real() * abs_of(inv(j, i));
    pm.det_error = abs_of(pm.determinant) * acc;
  } else {
    pm.det_error = std::numeric_limits<double>::infinity();
  }
}

}  // namespace detail

// Multivalued rank-1 weight prod_k (y - lambda_k)^{s_k} continued along a
// path from the principal branches at the path start.
template <class C>
class TrackedWeight {
 public:
  using R = real_t<C>;

  TrackedWeight(const std::vector<C>& points, const std::vector<C>& exponents,
                const PathSpec<C>& path)
      : points_(points), exponents_(exponents) {
    for (const C& p : points) trackers_.emplace_back(path, p);
  }

  // log of the weight at a node, endpoint-stable.
  C log_at(const NodePoint<C>& pt) const {
    using std::log;
    C sum(0);
    for (size_t k = 0; k < points_.size(); ++k) {
      const C delta = pt.delta_to(points_[k]);
      const R a = trackers_[k].arg_at(pt.segment_index, pt.xi, delta);
      sum += exponents_[k] * C(log(abs_of(delta)), a);
    }
    return sum;
  }

 private:
  std::vector<C> points_;
  std::vector<C> exponents_;
  std::vector<BranchTracker<C>> trackers_;
};

// de Rham form prefactors for a configuration lambda_1..lambda_n.
template <class C>
C eta_form_value(const std::vector<C>& pts, int i, const NodePoint<C>& node) {
  C v(1);
  for (int k = 1; k < i; ++k) v *= node.z;
  for (const C& p : pts) v /= node.delta_to(p);
  return v;
}

template <class C>
C omega_form_value(const std::vector<C>& pts, int i, const NodePoint<C>& node) {
  return C(1) / node.delta_to(pts[i - 1]) - C(1) / node.delta_to(pts[i]);
}

// ---------------------------------------------------------------------------
// Rank-1 regular period matrix: entries int_{delta_j} w(y) form_i(y) dy with
// delta_j = gamma_{j+1} - gamma_j and w the tracked solution weight,
// principal at the base point.
// ---------------------------------------------------------------------------
template <class C>
PeriodMatrix<C> period_matrix_rank1(const std::vector<C>& pts, const std::vector<C>& exponents,
                                    const std::vector<PathSpec<C>>& gammas, FormBasis basis,
                                    const QuadratureSettings<real_t<C>>& settings) {
  using R = real_t<C>;
  const int n = static_cast<int>(pts.size());
  if (static_cast<int>(gammas.size()) != n)
    throw std::invalid_argument("period_matrix_rank1: one path per point required");
  using Col = Eigen::Matrix<C, Eigen::Dynamic, 1>;

  PeriodMatrix<C> pm;
  pm.entries = Mat<C>::Zero(n - 1, n - 1);
  Mat<C> errors = Mat<C>::Zero(n - 1, n - 1);

  std::vector<Col> leg_values(n);
  std::vector<R> leg_errors(n, R(0));
  for (int j = 0; j < n; ++j) {
    TrackedWeight<C> weight(pts, exponents, gammas[j]);
    auto f = [&](const NodePoint<C>& node) -> Col {
      Col out(n - 1);
      const C w = exp_of(weight.log_at(node));
      for (int i = 1; i <= n - 1; ++i)
        out(i - 1) = w * (basis == FormBasis::Eta ? eta_form_value(pts, i, node)
                                                  : omega_form_value(pts, i, node));
      return out;
    };
    auto res = integrate_path(f, gammas[j], settings);
    leg_values[j] = res.value;
    leg_errors[j] = res.error;
    pm.evaluations += res.evaluations;
    pm.converged = pm.converged && res.converged;
  }
  for (int j = 0; j < n - 1; ++j)
    for (int i = 0; i < n - 1; ++i) {
      pm.entries(i, j) = leg_values[j + 1](i) - leg_values[j](i);
      errors(i, j) = C(leg_errors[j + 1] + leg_errors[j]);
    }
  detail::finish_period_matrix(pm, errors);
  return pm;
}

// ---------------------------------------------------------------------------
// Rank-r regular period matrix via ODE transport: rows (i, a), columns
// (j, b); entry = int_{delta_j} form_i(y) [T(y) e_b]_a dy with T the dual
// fundamental matrix, T = I at the base point. Contributions closer to a
// singular endpoint than `clamp` (relative) are dropped; residue eigenvalue
// real parts >= 1 make the dropped tail O(clamp).
// ---------------------------------------------------------------------------
template <class C>
PeriodMatrix<C> period_matrix_transport(const LogConnection<C>& conn,
                                        const std::vector<PathSpec<C>>& gammas, FormBasis basis,
                                        const QuadratureSettings<real_t<C>>& settings,
                                        TransportSettings<C> tsettings =
                                            TransportSettings<C>::defaults(),
                                        double clamp = 1e-12) {
  using R = real_t<C>;
  const int n = static_cast<int>(conn.points.size());
  const int r = conn.rank;
  const std::vector<C> pts = conn.singular_locations();
  const int rows = (n - 1) * r;
  using Col = Eigen::Matrix<C, Eigen::Dynamic, 1>;

  PeriodMatrix<C> pm;
  pm.entries = Mat<C>::Zero(rows, rows);
  Mat<C> errors = Mat<C>::Zero(rows, rows);

  std::vector<Mat<C>> leg_values(n);  // rows x r block per leg
  std::vector<R> leg_errors(n, R(0));
  for (int j = 0; j < n; ++j) {
    TransportCache<C> cache(conn, gammas[j], tsettings);
    auto f = [&](const NodePoint<C>& node) -> Col {
      Col out = Col::Zero(rows * r);
      // drop nodes double-exponentially close to the singular path end; the
      // dual sections vanish there, so the dropped tail is O(clamp)
      if (to_double(node.xic) < clamp &&
          node.segment_index == gammas[j].segments.size() - 1)
        return out;
      const Mat<C>& t = cache.at(node.segment_index, node.xi);
      for (int i = 1; i <= n - 1; ++i) {
        const C form = (basis == FormBasis::Eta ? eta_form_value(pts, i, node)
                                                : omega_form_value(pts, i, node));
        for (int a = 0; a < r; ++a)
          for (int b = 0; b < r; ++b)
            out(((i - 1) * r + a) * r + b) = form * t(a, b);
      }
      return out;
    };
    auto res = integrate_path(f, gammas[j], settings);
    Mat<C> block(rows, r);
    for (int row = 0; row < rows; ++row)
      for (int b = 0; b < r; ++b) block(row, b) = res.value(row * r + b);
    leg_values[j] = block;
    leg_errors[j] = res.error;
    pm.evaluations += res.evaluations;
    pm.converged = pm.converged && res.converged;
  }
  for (int j = 0; j < n - 1; ++j)
    for (int b = 0; b < r; ++b)
      for (int row = 0; row < rows; ++row) {
        pm.entries(row, j * r + b) = leg_values[j + 1](row, b) - leg_values[j](row, b);
        errors(row, j * r + b) = C(leg_errors[j + 1] + leg_errors[j]);
      }
  detail::finish_period_matrix(pm, errors);
  return pm;
}

// Normalization factor relating the transport-normalized determinant to the
// closed-form product (omega basis): det_quad * prod_j (p - lambda_j)^{(n-1)
// tr B_j} = closed form, principal branches at the base point p.
template <class C>
C transport_normalization(const LogConnection<C>& conn, const C& base) {
  const int n = static_cast<int>(conn.points.size());
  C log_sum(0);
  for (size_t j = 0; j < conn.points.size(); ++j)
    log_sum += C(real_t<C>(n - 1)) * conn.residue_trace(j) * log_of(base - conn.points[j].location);
  return exp_of(log_sum);
}

// ---------------------------------------------------------------------------
// Approximation sequence for the Legendre pipeline (generic case), carried
// entirely in log space from the tabulated closed forms.
// ---------------------------------------------------------------------------
template <class C>
struct ApproxRecord {
  int m = 0;
  C log_dm{};       // log of the omega-basis determinant
  C delta_m{};      // Vandermonde of the 5-point configuration
  C p_m{};          // m^{-8m} D_m / Delta_m^2
  C factor_power{};  // (1/m)^{8m} (m^2-c1)^{2m} (m^2-c2)^{2m}
  C factor_symbol{};  // m^{-10} (m^2-c1)^{5/2} (m^2-c2)^{5/2}
  C factor_gamma{};  // m^{10} Gamma(m+1)^2 / (Gamma(m+1+14/3) Gamma(m+1+16/3))
};

template <class C>
struct ApproxResult {
  std::vector<ApproxRecord<C>> records;
  C limit{};          // Richardson-extrapolated limit
  real_t<C> limit_error{};
  C closed_form{};    // 4 pi^2 c1^{3/2} c2^{3/2} / (c1-c2)^3
  int monotone_from = -1;  // first m with monotone |P_m - limit| afterwards
  bool converged = false;
};

namespace detail {

// Richardson extrapolation: polynomial fit in 1/m through the last K
// records (the sequence is analytic in 1/m); the deviation from the fit on
// one fewer point is the error estimate. K is capped by the precision so
// the Vandermonde solve does not amplify roundoff past the data accuracy.
template <class C>
void richardson(ApproxResult<C>& out) {
  using R = real_t<C>;
  const auto& rec = out.records;
  const size_t k = rec.size();
  if (k < 2) {
    out.limit = rec.back().p_m;
    out.limit_error = R(1);
    return;
  }
  auto fit = [&](size_t npts) -> C {
    const size_t off = k - npts;
    Mat<C> mat(npts, npts);
    Eigen::Matrix<C, Eigen::Dynamic, 1> rhs(npts);
    for (size_t row = 0; row < npts; ++row) {
      const C u = C(R(1) / R(rec[off + row].m));
      C p(1);
      for (size_t col = 0; col < npts; ++col) {
        mat(row, col) = p;
        p *= u;
      }
      rhs(row) = rec[off + row].p_m;
    }
    Eigen::Matrix<C, Eigen::Dynamic, 1> sol = mat.fullPivLu().solve(rhs);
    return sol(0);
  };
  const size_t kmax = (std::numeric_limits<R>::digits10 > 20) ? 12 : 4;
  const size_t n = std::min(k, kmax);
  out.limit = fit(n);
  out.limit_error = abs_of(out.limit - fit(n - 1));
}

template <class C>
void finish_approx(ApproxResult<C>& out) {
  using R = real_t<C>;
  richardson(out);
  // monotonicity of |P_m - limit|
  out.monotone_from = -1;
  for (size_t i = 0; i + 1 < out.records.size(); ++i) {
    bool mono = true;
    for (size_t j = i; j + 1 < out.records.size(); ++j)
      if (!(abs_of(out.records[j + 1].p_m - out.limit) <
            abs_of(out.records[j].p_m - out.limit)))
        mono = false;
    if (mono) {
      out.monotone_from = out.records[i].m;
      break;
    }
  }
  out.converged = out.limit_error < R(1e-3) * (abs_of(out.limit) + R(1e-30));
}

}  // namespace detail

template <class C>
ApproxResult<C> approx_sequence(const CriticalData<C>& cd, const std::vector<int>& m_list) {
  using R = real_t<C>;
  if (cd.kase != CurveCase::Generic)
    throw std::invalid_argument("approx_sequence: generic case only");
  ApproxResult<C> out;
  for (int m : m_list) {
    check_regularization_index(RegularizationIndex<C>{m}, cd);
    ApproxRecord<C> rec;
    rec.m = m;
    const R rm(m);
    const C m2 = C(rm) * C(rm);
    const C mp1 = C(rm + 1);
    rec.log_dm = log_dm_reference(cd, m);
    rec.delta_m = delta_m_reference(cd, m);
    const C log_pm = rec.log_dm - C(8 * rm) * log_of(C(rm)) - C(2) * log_of(rec.delta_m);
    rec.p_m = exp_of(log_pm);
    rec.factor_power = exp_of(C(2 * rm) * (log_of(m2 - cd.c1) + log_of(m2 - cd.c2)) -
                              C(8 * rm) * log_of(C(rm)));
    rec.factor_symbol = exp_of(C(R(5) / 2) * (log_of(m2 - cd.c1) + log_of(m2 - cd.c2)) -
                               C(10) * log_of(C(rm)));
    rec.factor_gamma = exp_of(C(10) * log_of(C(rm)) + C(2) * log_gamma(mp1) -
                              log_gamma(mp1 + C(R(14) / 3)) - log_gamma(mp1 + C(R(16) / 3)));
    out.records.push_back(rec);
  }
  const C c32_1 = cd.s1 * cd.s1 * cd.s1;  // c1^{3/2} with the recorded branch
  const C c32_2 = cd.s2 * cd.s2 * cd.s2;
  const R pi = scalar_traits<C>::pi();
  const C diff = cd.c1 - cd.c2;
  out.closed_form = C(4 * pi * pi) * c32_1 * c32_2 / (diff * diff * diff);
  detail::finish_approx(out);
  return out;
}

// Closed-form limit of the full direct-image period: rank-1 part
// 4 s1 s2 (c1-c2)^2 times the rank-2 limit.
template <class C>
C pushforward_period(const CriticalData<C>& cd) {
  using R = real_t<C>;
  if (cd.kase != CurveCase::Generic)
    throw std::invalid_argument("pushforward_period: generic case only");
  const R pi = scalar_traits<C>::pi();
  const C rank1 = C(4) * cd.s1 * cd.s2 * (cd.c1 - cd.c2) * (cd.c1 - cd.c2);
  const C c32_1 = cd.s1 * cd.s1 * cd.s1;
  const C c32_2 = cd.s2 * cd.s2 * cd.s2;
  const C diff = cd.c1 - cd.c2;
  const C rank2 = C(4 * pi * pi) * c32_1 * c32_2 / (diff * diff * diff);
  return rank1 * rank2;  // = 2^4 pi^2 c1^2 c2^2 / (c1 - c2)
}

// ---------------------------------------------------------------------------
// Exceptional pipeline: 2x2 analog with residue eigenvalues {1/3, 2/3}.
// ---------------------------------------------------------------------------
template <class C>
struct ExceptionalRecord {
  int m = 0;
  C p_m{};
  C factor_power{};   // (m^2-c1)^{2m} / m^{4m}
  C factor_symbol{};  // (m^2-c1)/m^2
  C factor_gamma{};   // m^2 Gamma(m+1)^2/(Gamma(m+1+2/3) Gamma(m+1+4/3))
};

template <class C>
struct ExceptionalResult {
  std::vector<ExceptionalRecord<C>> records;
  C limit{};
  real_t<C> limit_error{};
  C closed_form{};       // Gamma(1/3)^2 Gamma(2/3)^2 = 4 pi^2 / 3
  C sigma_det{};         // 2 s1
  C assembled{};         // limit / sigma_det
  C reference_value{};   // 2 pi^2 / (-3)^{1/4}, principal branch
  bool converged = false;
};

template <class C>
ExceptionalResult<C> exceptional_pipeline(const CriticalData<C>& cd,
                                          const std::vector<int>& m_list) {
  using R = real_t<C>;
  if (cd.kase != CurveCase::Exceptional)
    throw std::invalid_argument("exceptional_pipeline: exceptional case only");
  const R pi = scalar_traits<C>::pi();
  ExceptionalResult<C> out;
  const C gamma_part = exp_of(C(2) * (log_gamma(C(R(1) / 3)) + log_gamma(C(R(2) / 3))));
  for (int m : m_list) {
    ExceptionalRecord<C> rec;
    rec.m = m;
    const R rm(m);
    const C m2 = C(rm) * C(rm);
    const C mp1 = C(rm + 1);
    rec.factor_power = exp_of(C(2 * rm) * log_of(m2 - cd.c1) - C(4 * rm) * log_of(C(rm)));
    rec.factor_symbol = (m2 - cd.c1) / m2;
    rec.factor_gamma = exp_of(C(2) * log_of(C(rm)) + C(2) * log_gamma(mp1) -
                              log_gamma(mp1 + C(R(2) / 3)) - log_gamma(mp1 + C(R(4) / 3)));
    rec.p_m = gamma_part * rec.factor_power * rec.factor_symbol * rec.factor_gamma;
    out.records.push_back(rec);
  }
  // reuse the generic Richardson machinery
  ApproxResult<C> tmp;
  for (const auto& rec : out.records) {
    ApproxRecord<C> r2;
    r2.m = rec.m;
    r2.p_m = rec.p_m;
    tmp.records.push_back(r2);
  }
  detail::finish_approx(tmp);
  out.limit = tmp.limit;
  out.limit_error = tmp.limit_error;
  out.converged = tmp.converged;
  out.closed_form = C(4 * pi * pi / 3);
  out.sigma_det = C(2) * cd.s1;
  out.assembled = out.limit / out.sigma_det;
  out.reference_value = C(2 * pi * pi) * exp_of(-log_of(C(-3)) / C(4));
  return out;
}

}  // namespace irrper
