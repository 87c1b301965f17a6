#pragma once

/**
 * @file energy.hpp
 *
 * @brief Polyconvex stored energies W(F) = G(F, cof F, det F) with convex G,
 * the built-in power-law family, and an auditor for the coercivity / growth
 * hypotheses the minimizing-movements scheme relies on.
 */

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmelas/random.hpp"
#include "mmelas/tensor.hpp"

namespace mmelas {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// G = c1 |F|^p + c2 |Z|^q + c3 w^r + c0
struct PowerLawParams {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c0 = 0.0;
  double p = 6.0;
  double q = 2.0;
  double r = 2.0;
  friend bool operator==(const PowerLawParams&, const PowerLawParams&) = default;
};

struct EnergyGradient {
  Mat3 dF;
  Mat3 dZ;
  double dw = 0.0;
};

/// A convex G together with its gradient and declared growth exponents.
///
/// The evaluators receive `extended = true` when the caller accepts the
/// symmetric extension w -> |w| for transient iterates with w < 0.
struct EnergySpec {
  std::string name;
  std::function<double(const StateTriple&, bool extended)> value;
  std::function<EnergyGradient(const StateTriple&, bool extended)> gradient;
  double p = 6.0;
  double q = 2.0;
  double r = 2.0;

  /// p' = p / (p - 1) for p > 3; the representative 1.4 < 3/2 when p = 3.
  [[nodiscard]] double conjugate_exponent() const { return p > 3.0 ? p / (p - 1.0) : 1.4; }
};

namespace detail {
// x^e for x >= 0, with 0^e = 0 for e > 0.
inline double pow_nonneg(double x, double e) { return x == 0.0 ? 0.0 : std::pow(x, e); }
}  // namespace detail

inline EnergySpec power_law_energy(const PowerLawParams& prm) {
  EnergySpec spec;
  spec.name = "power_law";
  spec.p = prm.p;
  spec.q = prm.q;
  spec.r = prm.r;
  spec.value = [prm](const StateTriple& x, bool extended) {
    if (x.w < 0.0 && !extended) throw DomainError("G evaluated with w < 0");
    const double nf2 = frob_dot(x.F, x.F);
    const double nz2 = frob_dot(x.Z, x.Z);
    return prm.c1 * detail::pow_nonneg(nf2, 0.5 * prm.p) + prm.c2 * detail::pow_nonneg(nz2, 0.5 * prm.q) +
           prm.c3 * detail::pow_nonneg(std::abs(x.w), prm.r) + prm.c0;
  };
  spec.gradient = [prm](const StateTriple& x, bool extended) {
    if (x.w < 0.0 && !extended) throw DomainError("grad G evaluated with w < 0");
    const double nf2 = frob_dot(x.F, x.F);
    const double nz2 = frob_dot(x.Z, x.Z);
    EnergyGradient g;
    g.dF = (prm.c1 * prm.p * detail::pow_nonneg(nf2, 0.5 * prm.p - 1.0)) * x.F;
    g.dZ = (prm.c2 * prm.q * detail::pow_nonneg(nz2, 0.5 * prm.q - 1.0)) * x.Z;
    const double aw = std::abs(x.w);
    g.dw = prm.c3 * prm.r * detail::pow_nonneg(aw, prm.r - 1.0) * (x.w < 0.0 ? -1.0 : 1.0);
    return g;
  };
  return spec;
}

inline double eval_G(const EnergySpec& spec, const StateTriple& x, bool extended = false) {
  return spec.value(x, extended);
}

inline EnergyGradient eval_grad_G(const EnergySpec& spec, const StateTriple& x, bool extended = false) {
  return spec.gradient(x, extended);
}

/// W(F) = G(Phi(F)), defined for det F >= 0.
inline double eval_W(const EnergySpec& spec, const Mat3& f) {
  const StateTriple x = phi(f);
  if (x.w < 0.0) throw DomainError("W evaluated with det F < 0");
  return spec.value(x, false);
}

// ---------------------------------------------------------------------------
// Hypothesis auditing

enum class Verdict { pass, fail, sampled_pass };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::sampled_pass: return "sampled-pass";
  }
  return "?";
}

struct HypothesisCheck {
  std::string hypothesis;  // "H1" .. "H4"
  Verdict verdict = Verdict::pass;
  std::string detail;
  std::optional<StateTriple> witness;
  std::string failing_term;  // for H4: "dF", "dZ" or "dw"
};

struct HypothesisReport {
  std::vector<HypothesisCheck> checks;

  [[nodiscard]] bool all_pass() const {
    for (const auto& c : checks)
      if (c.verdict == Verdict::fail) return false;
    return true;
  }
  [[nodiscard]] const HypothesisCheck* find(const std::string& h) const {
    for (const auto& c : checks)
      if (c.hypothesis == h) return &c;
    return nullptr;
  }
};

/// Growth-exponent part of H4 for G with |dF G| ~ |F|^{p-1}, |dZ G| ~ |Z|^{q-1}, |dw G| ~ w^{r-1}.
///
/// Each term must grow no faster than the matching coercive power:
///   (p-1) p'                <= p
///   (q-1) p p' / (p - p')   <= q
///   (r-1) p p' / (p - 2 p') <= r
inline HypothesisCheck check_growth_exponents(double p, double q, double r) {
  HypothesisCheck c;
  c.hypothesis = "H4";
  if (p < 3.0) {
    c.verdict = Verdict::fail;
    c.detail = "p < 3: conjugate exponent undefined";
    c.failing_term = "dF";
    return c;
  }
  const double pc = p > 3.0 ? p / (p - 1.0) : 1.4;
  const double ez = p * pc / (p - pc);
  const double denom_w = p - 2.0 * pc;
  constexpr double slack = 1e-12;
  auto fmt = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return std::string(buf);
  };
  c.detail = "p'=" + fmt(pc);
  if ((p - 1.0) * pc > p + slack) {
    c.verdict = Verdict::fail;
    c.failing_term = "dF";
    c.detail += "; violated: (p-1)p' = " + fmt((p - 1.0) * pc) + " > p = " + fmt(p);
    return c;
  }
  if ((q - 1.0) * ez > q + slack) {
    c.verdict = Verdict::fail;
    c.failing_term = "dZ";
    c.detail += "; violated: (q-1)pp'/(p-p') = " + fmt((q - 1.0) * ez) + " > q = " + fmt(q);
    return c;
  }
  if (denom_w <= 0.0) {
    c.verdict = Verdict::fail;
    c.failing_term = "dw";
    c.detail += "; violated: p - 2p' = " + fmt(denom_w) + " <= 0";
    return c;
  }
  const double ew = p * pc / denom_w;
  if ((r - 1.0) * ew > r + slack) {
    c.verdict = Verdict::fail;
    c.failing_term = "dw";
    c.detail += "; violated: (r-1)pp'/(p-2p') = " + fmt((r - 1.0) * ew) + " > r = " + fmt(r);
    return c;
  }
  c.detail += "; (p-1)p'<=p, (q-1)pp'/(p-p')<=q, (r-1)pp'/(p-2p')<=r";
  return c;
}

/// Symbolic check of H1-H4 for the power-law family.
inline HypothesisReport check_hypotheses(const PowerLawParams& prm) {
  HypothesisReport rep;

  HypothesisCheck h1{"H1", Verdict::pass, "", std::nullopt, ""};
  if (prm.p < 1.0 || prm.q < 1.0 || prm.r < 1.0 || prm.c1 <= 0.0 || prm.c2 <= 0.0 || prm.c3 <= 0.0) {
    h1.verdict = Verdict::fail;
    h1.detail = "norm powers are convex only for exponents >= 1 and positive coefficients";
  } else {
    h1.detail = "sum of convex norm powers with positive coefficients";
  }
  rep.checks.push_back(h1);

  HypothesisCheck h2{"H2", Verdict::pass, "", std::nullopt, ""};
  if (prm.p < 3.0) {
    h2.verdict = Verdict::fail;
    h2.detail = "requires p >= 3";
  } else if (prm.q < 2.0) {
    h2.verdict = Verdict::fail;
    h2.detail = "requires q >= 2";
  } else if (prm.r < 2.0) {
    h2.verdict = Verdict::fail;
    h2.detail = "requires r >= 2";
  } else if (prm.c1 <= 0.0 || prm.c2 <= 0.0 || prm.c3 <= 0.0) {
    h2.verdict = Verdict::fail;
    h2.detail = "requires c1, c2, c3 > 0";
  } else {
    h2.detail = "C1 = min(c1,c2,c3), C2 = c0";
  }
  rep.checks.push_back(h2);

  HypothesisCheck h3{"H3", Verdict::pass, "c = max(c1,c2,c3,c0,0)", std::nullopt, ""};
  rep.checks.push_back(h3);

  rep.checks.push_back(check_growth_exponents(prm.p, prm.q, prm.r));
  return rep;
}

/// Sampled convexity test of G on w > 0.
inline HypothesisReport convexity_probe(const EnergySpec& spec, std::size_t samples, std::uint64_t seed) {
  HypothesisReport rep;
  HypothesisCheck c;
  c.hypothesis = "H1";
  if (samples == 0) {
    c.verdict = Verdict::sampled_pass;
    c.detail = "sampled-pass, no samples";
    rep.checks.push_back(c);
    return rep;
  }
  Rng rng(seed);
  auto random_triple = [&rng]() {
    StateTriple x;
    for (auto& e : x.F.a) e = rng.uniform(-2.0, 2.0);
    for (auto& e : x.Z.a) e = rng.uniform(-2.0, 2.0);
    x.w = rng.uniform(1e-3, 3.0);
    return x;
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const StateTriple x1 = random_triple();
    const StateTriple x2 = random_triple();
    const double lam = rng.uniform(1e-3, 1.0 - 1e-3);
    const StateTriple xm = lam * x1 + (1.0 - lam) * x2;
    const double g1 = spec.value(x1, false);
    const double g2 = spec.value(x2, false);
    const double gm = spec.value(xm, false);
    const double rhs = lam * g1 + (1.0 - lam) * g2;
    const double scale = 1.0 + std::abs(g1) + std::abs(g2);
    if (gm > rhs + 1e-10 * scale) {
      c.verdict = Verdict::fail;
      c.witness = xm;
      char buf[160];
      std::snprintf(buf, sizeof buf, "convexity violated at sample %zu: G(mid)=%.17g > %.17g (lambda=%.6g)", s, gm,
                    rhs, lam);
      c.detail = buf;
      rep.checks.push_back(c);
      return rep;
    }
  }
  c.verdict = Verdict::sampled_pass;
  c.detail = std::to_string(samples) + " samples";
  rep.checks.push_back(c);
  return rep;
}

}  // namespace mmelas
