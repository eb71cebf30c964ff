#include "irrper/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "irrper/comparison.hpp"
#include "irrper/connection.hpp"
#include "irrper/curve.hpp"
#include "irrper/direct_curve.hpp"
#include "irrper/period_engine.hpp"
#include "irrper/product_formula.hpp"
#include "irrper/scalar.hpp"

namespace irrper {
namespace {

using json = nlohmann::ordered_json;

template <class C>
json jc(const C& z) {
  return json{{"re", to_double(z.real())}, {"im", to_double(z.imag())}};
}

template <class C>
json check(const std::string& name, const std::string& provenance, double error, double tol,
           bool pass) {
  return json{{"name", name}, {"provenance", provenance}, {"error", error},
              {"tol", tol},   {"pass", pass}};
}

// eight evenly spaced rungs up to m (clamped below at 3, deduplicated)
std::vector<int> m_ladder(int m) {
  std::vector<int> out;
  for (int k = 1; k <= 8; ++k) {
    int v = std::max(3, (m * k) / 8);
    if (out.empty() || out.back() < v) out.push_back(v);
  }
  return out;
}

template <class C>
json run_verify(const CriticalData<C>& cd, const RunOptions& opts) {
  using R = real_t<C>;
  json doc;
  json checks = json::array();
  bool passed = true;
  auto add = [&](json c) {
    passed = passed && c["pass"].get<bool>();
    checks.push_back(std::move(c));
  };

  const double ident = to_double(critical_identity_error(cd));
  add(check<C>("critical-value-identities", "derived", ident, 1e-12, ident < 1e-12));

  auto pair = pushforward_legendre(cd);
  const double fit = to_double(pair.matrix.fit_residual);
  add(check<C>("connection-matrix-fit", "derived", fit, 1e-10, fit < 1e-10));
  doc["matrix_variant"] = pair.variant == MatrixVariant::A   ? "A"
                          : pair.variant == MatrixVariant::B ? "B"
                                                             : "neither";

  LogConnection<C> reg;
  if (cd.kase == CurveCase::Generic)
    reg = regularize(twist_by_D(pair.rank2, cd), RegularizationIndex<C>{opts.m}, cd);
  else
    reg = regularize(twist_by_divisor(pair.rank2, {-cd.s1, cd.s1}),
                     RegularizationIndex<C>{opts.m}, cd);
  auto adm = admissibility(reg);
  add(check<C>("admissibility", "derived", adm.passes ? 0.0 : 1.0, 0.5, adm.passes));

  if (cd.kase == CurveCase::Generic) {
    auto sig = sigma_matrix(cd);
    const double err =
        to_double(abs_of(sig.det - sig.det_closed) / (abs_of(sig.det_closed) + R(1e-300)));
    add(check<C>("change-of-basis-determinant", "closed_form", err, 1e-10, err < 1e-10));

    auto fp = final_period(cd);
    const double agree = to_double(abs_of(fp.closed_critical - fp.closed_lambda) /
                                   (abs_of(fp.closed_lambda) + R(1e-300)));
    add(check<C>("final-period-closed-forms", "closed_form", agree, 1e-10, agree < 1e-10));
  }

  doc["checks"] = std::move(checks);
  doc["passed"] = passed;
  return doc;
}

template <class C>
json run_period(const CriticalData<C>& cd) {
  json doc;
  if (cd.kase == CurveCase::Generic) {
    auto fp = final_period(cd);
    doc["pushforward"] = jc(fp.pushforward);
    doc["sigma_det"] = jc(fp.sigma_det);
    doc["assembled"] = jc(fp.assembled);
    doc["closed_critical"] = jc(fp.closed_critical);
    doc["closed_lambda"] = jc(fp.closed_lambda);
    doc["printed_variant"] = jc(fp.printed_variant);
    doc["provenance"] = "closed_form";
    const double agree =
        to_double(abs_of(fp.closed_critical - fp.closed_lambda) / abs_of(fp.closed_lambda));
    doc["branch"] = json{{"half_power_matched_to_ordering", true}};
    doc["passed"] = agree < 1e-10;
  } else {
    auto fp = final_period_exceptional(cd);
    doc["limit"] = jc(fp.limit);
    doc["sigma_det"] = jc(fp.sigma_det);
    doc["assembled"] = jc(fp.assembled);
    doc["reference_value"] = jc(fp.reference_value);
    doc["provenance"] = "closed_form";
    const double agree = to_double(
        std::min(abs_of(fp.assembled - fp.reference_value),
                 abs_of(fp.assembled + fp.reference_value)) /
        abs_of(fp.reference_value));
    doc["branch"] = json{{"sign_matched", true}};
    doc["passed"] = agree < 1e-10;
  }
  return doc;
}

template <class C>
json run_approx(const CriticalData<C>& cd, const RunOptions& opts) {
  json doc;
  auto res = approx_sequence(cd, m_ladder(opts.m));
  json rows = json::array();
  for (const auto& rec : res.records) {
    rows.push_back(json{{"m", rec.m},
                        {"p_m", jc(rec.p_m)},
                        {"factor_power", jc(rec.factor_power)},
                        {"factor_symbol", jc(rec.factor_symbol)},
                        {"factor_gamma", jc(rec.factor_gamma)}});
  }
  doc["records"] = std::move(rows);
  doc["limit"] = jc(res.limit);
  doc["limit_error"] = to_double(res.limit_error);
  doc["closed_form"] = jc(res.closed_form);
  doc["monotone_from"] = res.monotone_from;
  doc["provenance"] = "closed_form";
  doc["passed"] = res.converged;
  return doc;
}

template <class C>
json run_exceptional(const CriticalData<C>& cd, const RunOptions& opts) {
  json doc;
  auto res = exceptional_pipeline(cd, m_ladder(opts.m));
  json rows = json::array();
  for (const auto& rec : res.records) {
    rows.push_back(json{{"m", rec.m},
                        {"p_m", jc(rec.p_m)},
                        {"factor_power", jc(rec.factor_power)},
                        {"factor_symbol", jc(rec.factor_symbol)},
                        {"factor_gamma", jc(rec.factor_gamma)}});
  }
  doc["records"] = std::move(rows);
  doc["limit"] = jc(res.limit);
  doc["limit_error"] = to_double(res.limit_error);
  doc["closed_form"] = jc(res.closed_form);
  doc["assembled"] = jc(res.assembled);
  doc["reference_value"] = jc(res.reference_value);
  doc["provenance"] = "closed_form";
  doc["passed"] = res.converged;
  return doc;
}

template <class C>
json run_direct(const CriticalData<C>& cd, const RunOptions& opts) {
  using R = real_t<C>;
  json doc;
  QuadratureSettings<R> qs = QuadratureSettings<R>::defaults();
  if (opts.tol > 0) qs.rel_tol = R(opts.tol);
  auto res = direct_curve_period(cd, qs);
  json mat = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(jc(C(res.periods(i, j))));
    mat.push_back(std::move(row));
  }
  doc["periods"] = std::move(mat);
  doc["determinant"] = jc(res.determinant);
  doc["det_error"] = to_double(res.det_error);
  doc["stokes_max"] = to_double(res.stokes_max);
  doc["closed_form"] = jc(res.closed_form);
  doc["ratio"] = jc(res.ratio);
  doc["evaluations"] = res.evaluations;
  doc["provenance"] = "quadrature";
  doc["passed"] = res.converged && to_double(res.stokes_max) < 1e-6;
  return doc;
}

template <class C>
json dispatch(const RunOptions& opts) {
  const C lambda = make_cplx<C>(opts.lambda_re, opts.lambda_im);
  const CriticalData<C> cd = critical_data(make_curve(lambda));
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["mode"] = opts.mode;
  doc["precision"] = opts.precision;
  doc["lambda"] = jc(lambda);
  doc["case"] = cd.kase == CurveCase::Generic ? "generic" : "exceptional";
  doc["warnings"] = cd.warnings;

  json body;
  if (opts.mode == "verify")
    body = run_verify(cd, opts);
  else if (opts.mode == "period")
    body = run_period(cd);
  else if (opts.mode == "approx")
    body = run_approx(cd, opts);
  else if (opts.mode == "exceptional")
    body = run_exceptional(cd, opts);
  else if (opts.mode == "direct")
    body = run_direct(cd, opts);
  else
    throw std::invalid_argument("unknown mode: " + opts.mode);
  for (auto& [k, v] : body.items()) doc[k] = v;
  return doc;
}

}  // namespace

json run_mode(const RunOptions& opts) {
  if (opts.format != "json" && opts.format != "csv")
    throw std::invalid_argument("unknown format: " + opts.format);
  if (opts.format == "csv" && opts.mode != "approx" && opts.mode != "exceptional")
    throw std::invalid_argument("csv output is only defined for the sequence modes");
  RunOptions o = opts;
  if (o.mode == "exceptional" && o.lambda_re == 2.0 && o.lambda_im == 0.0) {
    o.lambda_re = 0.5;  // default to the exceptional locus
    o.lambda_im = 0.5 * std::sqrt(3.0);
  }
  if (o.precision != "extended" && o.precision != "double")
    throw std::invalid_argument("unknown precision: " + o.precision);
  const auto start = std::chrono::steady_clock::now();
  json doc = (o.precision == "extended") ? dispatch<cplx50>(o) : dispatch<cplx64>(o);
  if (opts.timings) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    doc["timings"] = json{{"total_ms", ms}};
  }
  return doc;
}

std::string render(const json& doc, const std::string& format) {
  if (format == "csv") {
    std::ostringstream out;
    out << "m,p_m_re,p_m_im,factor_power_re,factor_power_im,factor_symbol_re,"
           "factor_symbol_im,factor_gamma_re,factor_gamma_im\n";
    for (const auto& rec : doc.at("records")) {
      out << rec.at("m").get<int>();
      for (const char* key : {"p_m", "factor_power", "factor_symbol", "factor_gamma"})
        out << ',' << rec.at(key).at("re").get<double>() << ','
            << rec.at(key).at("im").get<double>();
      out << '\n';
    }
    return out.str();
  }
  return doc.dump(2) + "\n";
}

}  // namespace irrper
