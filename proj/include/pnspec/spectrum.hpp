#pragma once

// Chain-of-subalgebras eigenvalues. AIII/CI/DIII: Gelfand-Tsetlin rows of
// nested upper-left minors of a u(n)-valued moment map. BDI: (a_k, b_k) data
// of nested so blocks. Both are mapped affinely to Nijenhuis eigenvalues.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pnspec/errors.hpp"
#include "pnspec/hermsym.hpp"
#include "pnspec/numkernel.hpp"
#include "pnspec/spinrep.hpp"

namespace pnspec {

struct ChainEntry {
  std::size_t level = 0;
  std::size_t index = 0;  // 1-based; GT: position in ascending mapped order; BDI: 1 = "+", 2 = "-"
  double raw = 0.0;       // GT variable, or a_k for BDI
  double value = 0.0;     // Nijenhuis eigenvalue
  bool free = true;
  int tie = -1;           // structural tie key within a level (-1: untied)

  std::string label() const { return "l" + std::to_string(level) + "_" + std::to_string(index); }
};

struct ChainSpectrum {
  CaseFamily family = CaseFamily::AIII;
  std::vector<std::size_t> levels;         // level label per row
  std::vector<std::vector<double>> rows;   // GT rows, raw ascending
  std::vector<double> a;                   // BDI a_1..a_L (last even value signed)
  std::vector<double> b;                   // BDI b_1..b_L
  std::vector<ChainEntry> entries;

  std::vector<double> free_values() const {
    std::vector<double> v;
    for (const auto& e : entries)
      if (e.free) v.push_back(e.value);
    std::sort(v.begin(), v.end());
    return v;
  }

  std::size_t free_count() const {
    return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [](const ChainEntry& e) { return e.free; }));
  }

  /// Labeled polytope coordinates: free mapped eigenvalues "l<level>_<index>"
  /// for GT families, raw "a<k>", "b<k>" for BDI.
  std::vector<std::pair<std::string, double>> coordinates() const {
    std::vector<std::pair<std::string, double>> out;
    if (family == CaseFamily::BDI) {
      for (std::size_t k = 0; k < a.size(); ++k) out.emplace_back("a" + std::to_string(k + 1), a[k]);
      for (std::size_t k = 0; k < b.size(); ++k) out.emplace_back("b" + std::to_string(k + 1), b[k]);
    } else {
      for (const auto& e : entries)
        if (e.free) out.emplace_back(e.label(), e.value);
    }
    return out;
  }
};

struct MapConstants {
  double slope = -2.0;         // coefficient of the GT variable (BDI: of ±a_k)
  double offset = 0.0;         // -2i r_+
  double b_coefficient = 0.0;  // BDI: coefficient of sum_{j<=k} b_j
};

inline MapConstants nijenhuis_map_constants(const CaseSpec& cs) {
  MapConstants mc;
  mc.offset = (cplx(0.0, -2.0) * cs.r_plus).real();
  if (cs.family() == CaseFamily::BDI) {
    mc.slope = 1.0;
    mc.b_coefficient = -1.0;
  }
  return mc;
}

/// Structural tie groups of the top GT row (raw ascending order): equal ids
/// are equal on the whole orbit; `constant[g]` marks groups that are orbit
/// constants.
struct TopRowGroups {
  std::vector<int> group;
  std::vector<bool> constant;
};

inline TopRowGroups top_row_groups(const CaseSpec& cs) {
  TopRowGroups t;
  const std::size_t n = cs.params.n;
  switch (cs.family()) {
    case CaseFamily::AIII: {
      const std::size_t k = cs.params.k;
      for (std::size_t i = 0; i < n; ++i) t.group.push_back(i < n - k ? 0 : 1);
      t.constant = {true, true};
      break;
    }
    case CaseFamily::CI:
      for (std::size_t i = 0; i < n; ++i) t.group.push_back(static_cast<int>(i));
      t.constant.assign(n, false);
      break;
    case CaseFamily::DIII:
      for (std::size_t i = 0; i < n; ++i) t.group.push_back(static_cast<int>(i / 2));
      t.constant.assign((n + 1) / 2, false);
      if (n % 2 == 1) t.constant.back() = true;
      break;
    case CaseFamily::BDI:
      break;
  }
  return t;
}

/// Free mask over GT entries in raw order: mask[s][i] for level row s.
inline std::vector<std::vector<bool>> free_coordinates(const CaseSpec& cs, const TopRowGroups& groups) {
  std::vector<std::vector<bool>> mask;
  if (cs.family() == CaseFamily::BDI) {
    for (const auto& step : cs.chain_plan) mask.emplace_back(step.block >= 2 ? 2 : 1, true);
    return mask;
  }
  const std::size_t n = groups.group.size();
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> row(n - s, false);
    for (std::size_t i = 0; i < n - s; ++i) {
      const int gi = groups.group[i];
      if (s == 0) {
        row[i] = !groups.constant[static_cast<std::size_t>(gi)] && (i == 0 || groups.group[i - 1] != gi);
      } else {
        row[i] = gi != groups.group[i + s];
      }
    }
    mask.push_back(std::move(row));
  }
  return mask;
}

inline std::vector<std::vector<bool>> free_coordinates(const CaseSpec& cs) {
  return free_coordinates(cs, top_row_groups(cs));
}

struct InterlaceResult {
  bool pass = true;
  double margin = INFINITY;  // min over inequalities of (upper - lower); negative when violated
};

/// parent_i - slack <= child_i <= parent_{i+1} + slack.
inline InterlaceResult gt_interlace_check(const std::vector<double>& parent, const std::vector<double>& child,
                                          double slack = 1e-9) {
  if (child.size() + 1 != parent.size()) throw ShapeError("gt_interlace_check: child must be one shorter than parent");
  InterlaceResult r;
  for (std::size_t i = 0; i < child.size(); ++i) {
    r.margin = std::min(r.margin, child[i] - parent[i]);
    r.margin = std::min(r.margin, parent[i + 1] - child[i]);
  }
  if (child.empty()) r.margin = 0.0;
  r.pass = r.margin >= -slack;
  return r;
}

namespace detail {

inline std::vector<double> minor_spectrum(const CMatrix& b, std::size_t size) {
  CMatrix h = b.leading(size) * cplx(0.0, -1.0);
  return hermitian_eigenvalues(h, 1e-8);
}

// Largest |eigenvalue| of a real antisymmetric block, via the Hermitian -iB.
inline double antisymmetric_radius(const CMatrix& m, std::size_t size) {
  if (size < 2) return 0.0;
  CMatrix h(size, size);
  for (std::size_t i = 0; i < size; ++i)
    for (std::size_t j = 0; j < size; ++j) h(i, j) = cplx(0.0, -m(i, j).real());
  const auto ev = hermitian_eigenvalues(h, 1e-8);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

}  // namespace detail

struct PolytopeResult {
  bool pass = true;
  std::size_t violations = 0;
  double min_margin = INFINITY;
  std::vector<std::pair<std::string, double>> margins;  // named inequality margins

  void add(const std::string& name, double margin, double slack) {
    margins.emplace_back(name, margin);
    min_margin = std::min(min_margin, margin);
    if (margin < -slack) {
      ++violations;
      pass = false;
    }
  }
};

/// BDI cone data (a_0..a_N, b_1..b_N) with a_0 = 1, a_N = 0 and, in even
/// size, b_N = 0.
struct BdiCone {
  std::vector<double> a;
  std::vector<double> b;
};

inline BdiCone bdi_cone(const CaseSpec& cs, const ChainSpectrum& sp) {
  const std::size_t big_n = cs.spin_rank();
  BdiCone c;
  c.a.assign(big_n + 1, 0.0);
  c.b.assign(big_n + 1, 0.0);
  c.a[0] = 1.0;
  for (std::size_t k = 1; k <= sp.a.size() && k <= big_n; ++k) {
    c.a[k] = sp.a[k - 1];
    c.b[k] = sp.b[k - 1];
  }
  c.a[big_n] = 0.0;
  return c;
}

/// Case inequalities: GT interlacing for AIII/CI/DIII, the CI simplex bounds
/// 0 <= lambda <= 2 on the top row, DIII pairing of the top row, BDI cone.
inline PolytopeResult polytope_membership(const CaseSpec& cs, const ChainSpectrum& sp, double slack = 1e-9) {
  PolytopeResult res;
  if (cs.family() == CaseFamily::BDI) {
    const auto cone = bdi_cone(cs, sp);
    for (std::size_t k = 1; k < cone.a.size(); ++k) {
      const double prev = std::abs(cone.a[k - 1]);
      const double cur = std::abs(cone.a[k]);
      res.add("a" + std::to_string(k) + "<=a" + std::to_string(k - 1), prev - cur, slack);
      res.add("|b" + std::to_string(k) + "|<=a" + std::to_string(k - 1) + "-a" + std::to_string(k),
              prev - cur - std::abs(cone.b[k]), slack);
    }
    return res;
  }
  for (std::size_t s = 0; s + 1 < sp.rows.size(); ++s) {
    const auto ir = gt_interlace_check(sp.rows[s], sp.rows[s + 1], slack);
    res.add("interlace" + std::to_string(sp.levels[s]) + "_" + std::to_string(sp.levels[s + 1]), ir.margin, slack);
  }
  if (sp.rows.empty()) return res;
  const auto mc = nijenhuis_map_constants(cs);
  if (cs.family() == CaseFamily::CI) {
    for (double raw : sp.rows.front()) {
      const double v = mc.slope * raw + mc.offset;
      res.add("simplex_lower", v, slack);
      res.add("simplex_upper", 2.0 - v, slack);
    }
  }
  if (cs.family() == CaseFamily::DIII) {
    const auto& top = sp.rows.front();
    for (std::size_t i = 0; i + 1 < top.size(); i += 2) res.add("pairing", -std::abs(top[i + 1] - top[i]), slack);
  }
  return res;
}

struct ChainOptions {
  double slack = 1e-9;
  bool enforce = true;  // throw ConventionError when interlacing / cone fails
};

inline ChainSpectrum chain_spectrum(const CaseSpec& cs, const CMatrix& m, const ChainOptions& opt = {}) {
  ChainSpectrum sp;
  sp.family = cs.family();
  const auto mc = nijenhuis_map_constants(cs);

  if (cs.family() == CaseFamily::BDI) {
    const std::size_t M = cs.alg.size;
    const bool odd = M % 2 == 1;
    double cum = 0.0;
    for (const auto& step : cs.chain_plan) {
      const std::size_t k = step.level;
      const std::size_t size = step.block;
      double a = 0.0;
      if (size == 2 && !odd) {
        a = m(0, 1).real();
      } else {
        a = detail::antisymmetric_radius(m, size);
      }
      const std::size_t p = M - 2 * k;  // 0-based row of the so(2) plane after the block
      const double b = m(p, p + 1).real();
      cum += b;
      sp.levels.push_back(k);
      sp.a.push_back(a);
      sp.b.push_back(b);
      if (size >= 2) {
        sp.entries.push_back({k, 1, a, mc.slope * a + mc.b_coefficient * cum + mc.offset, true, -1});
        sp.entries.push_back({k, 2, a, -mc.slope * a + mc.b_coefficient * cum + mc.offset, true, -1});
      } else {
        sp.entries.push_back({k, 1, 0.0, mc.b_coefficient * cum + mc.offset, true, -1});
      }
    }
  } else {
    const CMatrix top = cs.family() == CaseFamily::AIII ? m : cs.w_plus.adjoint() * m * cs.w_plus;
    const auto groups = top_row_groups(cs);
    const auto mask = free_coordinates(cs, groups);
    for (std::size_t s = 0; s < cs.chain_plan.size(); ++s) {
      const auto& step = cs.chain_plan[s];
      auto row = detail::minor_spectrum(top, step.block);
      sp.levels.push_back(step.level);
      for (std::size_t i = 0; i < row.size(); ++i) {
        ChainEntry e;
        e.level = step.level;
        e.index = row.size() - i;
        e.raw = row[i];
        e.value = mc.slope * row[i] + mc.offset;
        e.free = mask[s][i];
        if (s == 0) {
          e.tie = groups.group[i];
        } else if (!e.free) {
          e.tie = groups.group[i];
        }
        sp.entries.push_back(e);
      }
      sp.rows.push_back(std::move(row));
    }
  }

  if (opt.enforce) {
    const auto pr = polytope_membership(cs, sp, opt.slack);
    for (const auto& [name, margin] : pr.margins) {
      if (name.rfind("interlace", 0) == 0 || cs.family() == CaseFamily::BDI) {
        if (margin < -opt.slack) {
          throw ConventionError("chain_spectrum " + cs.name() + ": inequality " + name + " violated by " +
                                std::to_string(-margin));
        }
      }
    }
  }
  return sp;
}

/// Smallest within-level distance between chain eigenvalues that are not
/// structurally tied (BDI: 2|a_k| on levels with a rank-2 block, excluding
/// the signed even-size final value).
inline double chain_gap(const CaseSpec& cs, const ChainSpectrum& sp) {
  double gap = INFINITY;
  if (cs.family() == CaseFamily::BDI) {
    const bool odd = cs.alg.size % 2 == 1;
    for (std::size_t i = 0; i < cs.chain_plan.size(); ++i) {
      const auto& step = cs.chain_plan[i];
      if (step.block < 2) continue;
      if (!odd && step.block == 2) continue;
      gap = std::min(gap, 2.0 * std::abs(sp.a[i]));
    }
    return gap;
  }
  std::size_t pos = 0;
  for (const auto& row : sp.rows) {
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      const auto& e1 = sp.entries[pos + i];
      const auto& e2 = sp.entries[pos + i + 1];
      if (e1.tie >= 0 && e1.tie == e2.tie) continue;
      gap = std::min(gap, std::abs(row[i + 1] - row[i]));
    }
    pos += row.size();
  }
  return gap;
}

/// Max deviation of sorted free chain values from sorted pencil values.
inline double multiset_distance(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size()) return INFINITY;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - y[i]));
  return r;
}

/// BDI: the upper-left 2^{N-k} minor of S(m) has spectrum
/// i(±a_k + sum_{j<=k} b_j)/2, each with multiplicity 2^{N-k-1} (a single
/// value when the minor is 1x1). Returns the max eigenvalue mismatch.
inline double spin_minor_residual(const CaseSpec& cs, const SpinRepresentation& rep, const CMatrix& m,
                                  const ChainSpectrum& sp) {
  if (cs.family() != CaseFamily::BDI) throw UsageError("spin_minor_residual applies to BDI only");
  const CMatrix s = rep.apply(m);
  const std::size_t big_n = rep.basis.rank;
  double worst = 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < sp.a.size(); ++i) {
    const std::size_t k = sp.levels[i];
    cum += sp.b[i];
    const std::size_t size = std::size_t{1} << (big_n - k);
    // S(m) is anti-Hermitian, so -i S restricted to the minor is Hermitian.
    const auto ev = hermitian_eigenvalues(s.leading(size) * cplx(0.0, -1.0), 1e-8);
    std::vector<double> expect;
    if (size == 1) {
      expect.push_back(0.5 * cum);
    } else {
      for (std::size_t r = 0; r < size / 2; ++r) {
        expect.push_back(0.5 * (sp.a[i] + cum));
        expect.push_back(0.5 * (-sp.a[i] + cum));
      }
    }
    worst = std::max(worst, multiset_distance(ev, expect));
  }
  return worst;
}

}  // namespace pnspec
