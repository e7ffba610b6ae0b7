#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cotran/cotranslation.hpp"
#include "cotran/evolution.hpp"
#include "cotran/group_checks.hpp"
#include "cotran/partial.hpp"
#include "detail.hpp"

namespace cotran::harness {
namespace {

using detail::check_dim_cap;
using detail::fail;
using detail::optional_number;
using detail::parse_element;
using detail::parse_group;
using detail::parse_mat;
using detail::parse_mat_list;
using detail::require_field;
using detail::require_int;
using detail::require_number;
using detail::require_string;

using Replayer = std::function<double(const LawEntry&)>;

void add_entry(RunResult& out, LawEntry e, Replayer rep) {
  if (rep) out.replayers.emplace(e.law, std::move(rep));
  out.report.entries.push_back(std::move(e));
}

const GroupElement& arg(const LawEntry& e, std::size_t i) {
  if (i >= e.argmax.size()) throw SpecError("replay: recorded location has too few elements");
  return e.argmax[i];
}

double metric(const LawEntry& e, const std::string& key) {
  const auto it = e.metrics.find(key);
  if (it == e.metrics.end()) throw SpecError("replay: missing metric '" + key + "'");
  return it->second;
}

// ---------------------------------------------------------------- builders

MorphismFn parse_morphism(const Json& j, const GroupHandle& grp, const std::string& path,
                          int* dim_out) {
  const std::string family = require_string(j, path, "family");
  if (family == "diag_pow") {
    if (grp.kind() != GroupKind::Z) fail(path, "diag_pow is defined over the integer group");
    const Json& bj = require_field(j, path, "base");
    if (!bj.is_array() || bj.empty()) fail(path + ".base", "expected a non-empty number array");
    std::vector<double> base;
    for (const Json& v : bj) {
      if (!v.is_number() || v.get<double>() == 0.0)
        fail(path + ".base", "diagonal bases must be non-zero numbers");
      base.push_back(v.get<double>());
    }
    *dim_out = static_cast<int>(base.size());
    const int d = *dim_out;
    return [base, d](const GroupElement& g) {
      const double n = static_cast<double>(g.as_int());
      Mat m(d);
      for (int i = 0; i < d; ++i) m(i, i) = std::pow(base[static_cast<std::size_t>(i)], n);
      return m;
    };
  }
  if (family == "identity") {
    const std::int64_t d = require_int(j, path, "dim");
    if (d < 1) fail(path + ".dim", "dimension must be positive");
    *dim_out = static_cast<int>(d);
    const int dd = *dim_out;
    return [dd](const GroupElement&) { return identity(dd); };
  }
  if (family == "rotation_angle") {
    if (grp.kind() != GroupKind::Z) fail(path, "rotation_angle is defined over the integer group");
    const double theta = require_number(j, path, "theta");
    *dim_out = 2;
    return [theta](const GroupElement& g) {
      const double a = theta * static_cast<double>(g.as_int());
      Mat m(2);
      m(0, 0) = std::cos(a);
      m(0, 1) = std::sin(a);
      m(1, 0) = -std::sin(a);
      m(1, 1) = std::cos(a);
      return m;
    };
  }
  fail(path + ".family", "unknown morphism family '" + family + "'");
}

struct BuiltCot {
  Cotranslation z;
  std::string kind;
  std::optional<MorphismFn> gamma;            // morphism and shifted kinds
  std::optional<Cotranslation> shifted_base;  // shifted kind
  std::vector<GeneratorMap> maps;             // generator_maps kind
};

BuiltCot build_cotranslation(const Json& j, const GroupHandle& grp, const ProblemSpec& spec,
                             const std::vector<GroupElement>& window, const std::string& path) {
  BuiltCot out;
  out.kind = require_string(j, path, "kind");
  if (out.kind == "difference_seq") {
    if (grp.kind() != GroupKind::Z) fail(path, "difference_seq needs the integer group");
    std::vector<Mat> period = parse_mat_list(require_field(j, path, "period"), path + ".period");
    check_dim_cap(period.front().dim(), spec.max_dim, path + ".period");
    out.z = from_difference_seq(DifferenceSeq::periodic(std::move(period)));
    return out;
  }
  if (out.kind == "morphism") {
    int dim = 0;
    MorphismFn gamma = parse_morphism(j, grp, path, &dim);
    check_dim_cap(dim, spec.max_dim, path);
    out.z = from_morphism(grp, dim, gamma, window, spec.tolerances.at("morphism"));
    out.gamma = std::move(gamma);
    return out;
  }
  if (out.kind == "generator_maps") {
    const std::int64_t dim = require_int(j, path, "dim");
    if (dim < 1) fail(path + ".dim", "dimension must be positive");
    check_dim_cap(static_cast<int>(dim), spec.max_dim, path);
    const Json& mj = require_field(j, path, "maps");
    if (!mj.is_array() || static_cast<int>(mj.size()) != grp.generator_count())
      fail(path + ".maps", "expected one matrix per generator (" +
                               std::to_string(grp.generator_count()) + ")");
    std::vector<GeneratorMap> maps;
    for (std::size_t i = 0; i < mj.size(); ++i) {
      Mat a = parse_mat(mj.at(i), path + ".maps[" + std::to_string(i) + "]");
      if (a.dim() != dim) fail(path + ".maps", "matrix dimension differs from 'dim'");
      maps.push_back([a](const GroupElement&) { return a; });
    }
    out.z = from_generator_maps(grp, static_cast<int>(dim), maps, window,
                                spec.tolerances.at("relations"));
    out.maps = std::move(maps);
    return out;
  }
  if (out.kind == "shifted") {
    BuiltCot base =
        build_cotranslation(require_field(j, path, "base"), grp, spec, window, path + ".base");
    int dim = 0;
    MorphismFn gamma = parse_morphism(require_field(j, path, "morphism"), grp,
                                      path + ".morphism", &dim);
    if (dim != base.z.dim()) fail(path + ".morphism", "dimension differs from the base family");
    out.z = shift_by_morphism(base.z, gamma, window, spec.tolerances.at("commutation"));
    out.gamma = std::move(gamma);
    out.shifted_base = base.z;
    return out;
  }
  if (out.kind == "explicit_table") {
    BuiltCot base =
        build_cotranslation(require_field(j, path, "base"), grp, spec, window, path + ".base");
    const Json& oj = require_field(j, path, "overrides");
    if (!oj.is_array()) fail(path + ".overrides", "expected an array of {g, h, value}");
    std::vector<PairOverride> ovr;
    for (std::size_t i = 0; i < oj.size(); ++i) {
      const std::string p = path + ".overrides[" + std::to_string(i) + "]";
      PairOverride o;
      o.g = parse_element(require_field(oj.at(i), p, "g"), grp, p + ".g");
      o.h = parse_element(require_field(oj.at(i), p, "h"), grp, p + ".h");
      o.value = parse_mat(require_field(oj.at(i), p, "value"), p + ".value");
      if (o.value.dim() != base.z.dim()) fail(p + ".value", "dimension differs from the family");
      ovr.push_back(std::move(o));
    }
    out.z = with_overrides(base.z, std::move(ovr));
    return out;
  }
  fail(path + ".kind", "unknown cotranslation kind '" + out.kind + "'");
}

void require_idempotent(const Mat& p, const std::string& path) {
  const IdempotencyResult r = is_idempotent(p);
  if (!r.idempotent)
    fail(path, "matrix is not idempotent (residual " + std::to_string(r.residual) + ")");
}

ProjectorMap parse_projector(const Json& j, const GroupHandle& grp, int dim,
                             const Cotranslation& base, const std::string& path) {
  const std::string kind = require_string(j, path, "kind");
  if (kind == "constant") {
    Mat p0 = parse_mat(require_field(j, path, "p0"), path + ".p0");
    if (p0.dim() != dim) fail(path + ".p0", "dimension differs from the family");
    require_idempotent(p0, path + ".p0");
    return ProjectorMap(grp, dim, [p0](const GroupElement&) { return p0; });
  }
  if (kind == "conjugated_constant") {
    Mat p0 = parse_mat(require_field(j, path, "p0"), path + ".p0");
    if (p0.dim() != dim) fail(path + ".p0", "dimension differs from the family");
    require_idempotent(p0, path + ".p0");
    // P(g) = Z(e, g) p0 Z(g, g^-1): conjugating a constant idempotent by the
    // frame Z(e, .) yields an invariant projector for Z.
    const GroupElement e = grp.identity();
    Cotranslation z = base;
    return ProjectorMap(grp, dim, [z, p0, e](const GroupElement& g) {
      const GroupHandle& grp2 = z.group();
      return mul(mul(z(e, g), p0), z(g, grp2.inverse(g)));
    });
  }
  if (kind == "alternating") {
    if (grp.kind() != GroupKind::Z) fail(path, "alternating needs the integer group");
    Mat even = parse_mat(require_field(j, path, "even"), path + ".even");
    Mat odd = parse_mat(require_field(j, path, "odd"), path + ".odd");
    if (even.dim() != dim || odd.dim() != dim)
      fail(path, "projector dimensions differ from the family");
    require_idempotent(even, path + ".even");
    require_idempotent(odd, path + ".odd");
    return ProjectorMap(grp, dim, [even, odd](const GroupElement& g) {
      return (g.as_int() % 2 == 0) ? even : odd;
    });
  }
  fail(path + ".kind", "unknown projector kind '" + kind + "'");
}

ConjugationMap parse_tmap(const Json& j, const GroupHandle& grp, int dim,
                          const std::string& path) {
  const std::string kind = require_string(j, path, "kind");
  if (kind == "constant") {
    Mat t0 = parse_mat(require_field(j, path, "t0"), path + ".t0");
    if (t0.dim() != dim) fail(path + ".t0", "dimension differs from the family");
    return ConjugationMap(grp, dim, [t0](const GroupElement&) { return t0; });
  }
  if (kind == "shear") {
    if (grp.kind() != GroupKind::Z) fail(path, "shear is defined over the integer group");
    if (dim != 2) fail(path, "shear needs a 2x2 family");
    const double scale = optional_number(j, "scale", 1.0);
    return ConjugationMap(grp, 2, [scale](const GroupElement& g) {
      Mat t = identity(2);
      t(0, 1) = scale * static_cast<double>(g.as_int());
      return t;
    });
  }
  fail(path + ".kind", "unknown tmap kind '" + kind + "'");
}

struct BuiltPartial {
  PartialCotranslation w;
  std::string kind;
  std::optional<Cotranslation> restrict_base;
  std::optional<ProjectorMap> projector;
  std::optional<PartialCotranslation> part_a, part_b;  // sum kind
  std::optional<PartialCotranslation> conj_base;
  std::optional<ConjugationMap> tmap;
};

BuiltPartial build_partial(const Json& j, const GroupHandle& grp, const ProblemSpec& spec,
                           const std::vector<GroupElement>& window, const std::string& path) {
  BuiltPartial out;
  out.kind = require_string(j, path, "kind");
  if (out.kind == "diag_powers") {
    if (grp.kind() != GroupKind::Z) fail(path, "diag_powers needs the integer group");
    const Json& ej = require_field(j, path, "entries");
    if (!ej.is_array() || ej.empty()) fail(path + ".entries", "expected a number array");
    std::vector<double> entries;
    for (const Json& v : ej) {
      if (!v.is_number()) fail(path + ".entries", "expected numbers");
      entries.push_back(v.get<double>());
    }
    const int d = static_cast<int>(entries.size());
    check_dim_cap(d, spec.max_dim, path + ".entries");
    // Zero entries stay zero for every displacement (including n = 0), so the
    // unit slice is the idempotent selecting the non-zero axes.
    out.w = PartialCotranslation::from_evaluator(
        grp, d, PartialCotranslation::Kind::Explicit,
        [entries, d](const GroupElement&, const GroupElement& h) {
          const double n = static_cast<double>(h.as_int());
          Mat m(d);
          for (int i = 0; i < d; ++i) {
            const double a = entries[static_cast<std::size_t>(i)];
            m(i, i) = (a == 0.0) ? 0.0 : std::pow(a, n);
          }
          return m;
        });
    return out;
  }
  if (out.kind == "restrict") {
    BuiltCot base =
        build_cotranslation(require_field(j, path, "base"), grp, spec, window, path + ".base");
    ProjectorMap p = parse_projector(require_field(j, path, "projector"), grp, base.z.dim(),
                                     base.z, path + ".projector");
    out.w = restrict_cotranslation(base.z, p, window, window,
                                   spec.tolerances.at("projector_invariance"));
    out.restrict_base = base.z;
    out.projector = std::move(p);
    return out;
  }
  if (out.kind == "sum") {
    const Json& pj = require_field(j, path, "parts");
    if (!pj.is_array() || pj.size() != 2) fail(path + ".parts", "expected exactly two parts");
    BuiltPartial a = build_partial(pj.at(0), grp, spec, window, path + ".parts[0]");
    BuiltPartial b = build_partial(pj.at(1), grp, spec, window, path + ".parts[1]");
    if (a.w.dim() != b.w.dim()) fail(path + ".parts", "parts have different dimensions");
    // The raw pointwise sum: the verify suite judges orthogonality, so bad
    // sums surface as failing entries instead of construction errors.
    PartialCotranslation wa = a.w, wb = b.w;
    out.w = PartialCotranslation::from_evaluator(
        grp, wa.dim(), PartialCotranslation::Kind::Sum,
        [wa, wb](const GroupElement& g, const GroupElement& h) {
          return add(wa(g, h), wb(g, h));
        });
    out.part_a = std::move(wa);
    out.part_b = std::move(wb);
    return out;
  }
  if (out.kind == "conjugated") {
    BuiltPartial base =
        build_partial(require_field(j, path, "base"), grp, spec, window, path + ".base");
    ConjugationMap t = parse_tmap(require_field(j, path, "tmap"), grp, base.w.dim(),
                                  path + ".tmap");
    out.w = conjugate(base.w, t);
    out.conj_base = base.w;
    out.tmap = std::move(t);
    return out;
  }
  if (out.kind == "of_cotranslation") {
    BuiltCot base =
        build_cotranslation(require_field(j, path, "base"), grp, spec, window, path + ".base");
    out.w = as_partial(base.z);
    return out;
  }
  if (out.kind == "explicit_table") {
    BuiltPartial base =
        build_partial(require_field(j, path, "base"), grp, spec, window, path + ".base");
    const Json& oj = require_field(j, path, "overrides");
    if (!oj.is_array()) fail(path + ".overrides", "expected an array of {g, h, value}");
    std::vector<PairOverride> ovr;
    for (std::size_t i = 0; i < oj.size(); ++i) {
      const std::string p = path + ".overrides[" + std::to_string(i) + "]";
      PairOverride o;
      o.g = parse_element(require_field(oj.at(i), p, "g"), grp, p + ".g");
      o.h = parse_element(require_field(oj.at(i), p, "h"), grp, p + ".h");
      o.value = parse_mat(require_field(oj.at(i), p, "value"), p + ".value");
      if (o.value.dim() != base.w.dim()) fail(p + ".value", "dimension differs from the family");
      ovr.push_back(std::move(o));
    }
    out.w = with_overrides(base.w, std::move(ovr));
    return out;
  }
  fail(path + ".kind", "unknown partial kind '" + out.kind + "'");
}

Hull build_hull(const Json& j, const GroupHandle& grp, const ProblemSpec& spec,
                const std::vector<GroupElement>& window, const std::string& path) {
  const std::string kind = require_string(j, path, "kind");
  if (kind != "of_cotranslation") fail(path + ".kind", "unknown hull kind '" + kind + "'");
  BuiltCot base =
      build_cotranslation(require_field(j, path, "base"), grp, spec, window, path + ".base");
  Hull h = to_hull(base.z);
  if (j.contains("corrupt_at"))
    h = corrupt_hull(h, parse_element(j.at("corrupt_at"), grp, path + ".corrupt_at"));
  return h;
}

CoeffFn parse_coeff(const Json& j, const std::string& path, int max_dim) {
  const std::string family = require_string(j, path, "family");
  if (family == "rotation") return CoeffFn::rotation(require_number(j, path, "omega"));
  if (family == "constant") {
    Mat a = parse_mat(require_field(j, path, "mat"), path + ".mat");
    check_dim_cap(a.dim(), max_dim, path + ".mat");
    return CoeffFn::constant(std::move(a));
  }
  if (family == "table") {
    const double step = require_number(j, path, "step");
    if (step <= 0.0) fail(path + ".step", "sample step must be positive");
    std::vector<Mat> mats = parse_mat_list(require_field(j, path, "mats"), path + ".mats");
    check_dim_cap(mats.front().dim(), max_dim, path + ".mats");
    bool nearest = false;
    if (j.contains("interp")) {
      const std::string interp = j.at("interp").get<std::string>();
      if (interp == "nearest")
        nearest = true;
      else if (interp != "linear")
        fail(path + ".interp", "expected 'linear' or 'nearest'");
    }
    return CoeffFn::periodic_table(step, std::move(mats), nearest);
  }
  if (family == "diag_poly") {
    const Json& cj = require_field(j, path, "coeffs");
    if (!cj.is_array() || cj.empty()) fail(path + ".coeffs", "expected rows of coefficients");
    std::vector<std::vector<double>> coeffs;
    for (const Json& row : cj) {
      if (!row.is_array() || row.empty())
        fail(path + ".coeffs", "each diagonal entry needs at least one coefficient");
      std::vector<double> r;
      for (const Json& v : row) {
        if (!v.is_number()) fail(path + ".coeffs", "coefficients must be numbers");
        r.push_back(v.get<double>());
      }
      coeffs.push_back(std::move(r));
    }
    check_dim_cap(static_cast<int>(coeffs.size()), max_dim, path + ".coeffs");
    return CoeffFn::diagonal_poly(std::move(coeffs));
  }
  if (family == "shifted") {
    CoeffFn base = parse_coeff(require_field(j, path, "base"), path + ".base", max_dim);
    return CoeffFn::shifted(base, require_number(j, path, "lambda"));
  }
  fail(path + ".family", "unknown coefficient family '" + family + "'");
}

// ------------------------------------------------------------- law suites

void add_cocycle_entries(RunResult& out, const Cotranslation& z, const ProblemSpec& spec,
                         const std::vector<GroupElement>& bases,
                         const std::vector<GroupElement>& disps) {
  add_entry(out,
            max_over("cocycle", spec.tolerances.at("cocycle"), base_disp_triples(bases, disps),
                     [&](const std::vector<GroupElement>& t) {
                       return cocycle_residual(z, t[0], t[1], t[2]);
                     }),
            [z](const LawEntry& e) { return cocycle_residual(z, arg(e, 0), arg(e, 1), arg(e, 2)); });
  add_entry(out,
            max_over("unit", spec.tolerances.at("unit"), all_singles(bases),
                     [&](const std::vector<GroupElement>& t) { return unit_residual(z, t[0]); }),
            [z](const LawEntry& e) { return unit_residual(z, arg(e, 0)); });
  add_entry(out,
            max_over("involution", spec.tolerances.at("involution"), base_disp_pairs(bases, disps),
                     [&](const std::vector<GroupElement>& t) {
                       return involution_residual(z, t[0], t[1]);
                     }),
            [z](const LawEntry& e) { return involution_residual(z, arg(e, 0), arg(e, 1)); });
}

void verify_cotranslation(RunResult& out, const BuiltCot& b, const GroupHandle& grp,
                          const ProblemSpec& spec, const std::vector<GroupElement>& window) {
  const Cotranslation& z = b.z;
  add_cocycle_entries(out, z, spec, window, window);

  LawEntry aut;
  const bool autonomous = is_autonomous(z, window, spec.tolerances.at("autonomy"), &aut);
  aut.pass = true;  // a base-point dependent family is not a defect
  aut.note = autonomous ? "autonomous within tolerance"
                        : "base-point dependent; largest deviation recorded";
  add_entry(out, std::move(aut), [z](const LawEntry& e) {
    return autonomy_residual(z, arg(e, 0), arg(e, 1), arg(e, 2));
  });

  if (b.kind == "morphism" && b.gamma) {
    const MorphismFn gamma = *b.gamma;
    add_entry(out,
              max_over("morphism", spec.tolerances.at("morphism"), all_pairs(window),
                       [&](const std::vector<GroupElement>& t) {
                         return morphism_pair_residual(grp, gamma, t[0], t[1]);
                       }),
              [grp, gamma](const LawEntry& e) {
                return morphism_pair_residual(grp, gamma, arg(e, 0), arg(e, 1));
              });
  }
  if (b.kind == "generator_maps") {
    VerificationReport rr = check_preserves_relations(grp, b.maps, z.dim(), window,
                                                      spec.tolerances.at("relations"));
    const std::vector<GeneratorMap> maps = b.maps;
    const int dim = z.dim();
    for (LawEntry& e : rr.entries)
      add_entry(out, std::move(e), [grp, maps, dim](const LawEntry& s) {
        return relation_residual(grp, maps, dim,
                                 static_cast<std::size_t>(metric(s, "relation_index")),
                                 arg(s, 0));
      });
  }
  if (b.kind == "shifted" && b.gamma && b.shifted_base) {
    const Cotranslation base = *b.shifted_base;
    const MorphismFn gamma = *b.gamma;
    add_entry(out,
              max_over("commutation", spec.tolerances.at("commutation"),
                       base_disp_triples(window, window),
                       [&](const std::vector<GroupElement>& t) {
                         return commutation_residual(base, gamma, t[0], t[1], t[2]);
                       }),
              [base, gamma](const LawEntry& e) {
                return commutation_residual(base, gamma, arg(e, 0), arg(e, 1), arg(e, 2));
              });
  }
}

void roundtrip_cotranslation(RunResult& out, const BuiltCot& b, const ProblemSpec& spec,
                             const std::vector<GroupElement>& window) {
  const Cotranslation& z = b.z;
  const Hull h = to_hull(z);
  add_entry(out,
            max_over("hull_admissible", spec.tolerances.at("hull_admissible"),
                     all_singles(window),
                     [&](const std::vector<GroupElement>& t) { return hull_unit_residual(h, t[0]); }),
            [h](const LawEntry& e) { return hull_unit_residual(h, arg(e, 0)); });
  add_entry(out,
            max_over("hull_axiom_iii", spec.tolerances.at("hull_axiom_iii"),
                     base_disp_triples(window, window),
                     [&](const std::vector<GroupElement>& t) {
                       return hull_axiom_residual(h, t[0], t[1], t[2]);
                     }),
            [h](const LawEntry& e) {
              return hull_axiom_residual(h, arg(e, 0), arg(e, 1), arg(e, 2));
            });
  const Cotranslation back = from_hull(h);
  add_entry(out,
            max_over("hull_roundtrip", spec.tolerances.at("hull_roundtrip"),
                     base_disp_pairs(window, window),
                     [&](const std::vector<GroupElement>& t) {
                       return op_norm(sub(back(t[0], t[1]), z(t[0], t[1])));
                     }),
            [back, z](const LawEntry& e) {
              return op_norm(sub(back(arg(e, 0), arg(e, 1)), z(arg(e, 0), arg(e, 1))));
            });
}

void verify_hull(RunResult& out, const Hull& h, const ProblemSpec& spec,
                 const std::vector<GroupElement>& window, bool with_roundtrip) {
  add_entry(out,
            max_over("hull_admissible", spec.tolerances.at("hull_admissible"),
                     all_singles(window),
                     [&](const std::vector<GroupElement>& t) { return hull_unit_residual(h, t[0]); }),
            [h](const LawEntry& e) { return hull_unit_residual(h, arg(e, 0)); });
  add_entry(out,
            max_over("hull_axiom_iii", spec.tolerances.at("hull_axiom_iii"),
                     base_disp_triples(window, window),
                     [&](const std::vector<GroupElement>& t) {
                       return hull_axiom_residual(h, t[0], t[1], t[2]);
                     }),
            [h](const LawEntry& e) {
              return hull_axiom_residual(h, arg(e, 0), arg(e, 1), arg(e, 2));
            });
  if (with_roundtrip) {
    const Hull back = to_hull(from_hull(h));
    add_entry(out,
              max_over("hull_roundtrip", spec.tolerances.at("hull_roundtrip"),
                       base_disp_pairs(window, window),
                       [&](const std::vector<GroupElement>& t) {
                         return op_norm(sub(back.time_slice(t[0], t[1]), h.time_slice(t[0], t[1])));
                       }),
              [back, h](const LawEntry& e) {
                return op_norm(
                    sub(back.time_slice(arg(e, 0), arg(e, 1)), h.time_slice(arg(e, 0), arg(e, 1))));
              });
  }
}

void partial_law_entries(RunResult& out, const PartialCotranslation& w, const ProblemSpec& spec,
                         const std::vector<GroupElement>& window) {
  add_entry(out,
            max_over("partial_law", spec.tolerances.at("partial_law"),
                     base_disp_triples(window, window),
                     [&](const std::vector<GroupElement>& t) {
                       return partial_cocycle_residual(w, t[0], t[1], t[2]);
                     }),
            [w](const LawEntry& e) {
              return partial_cocycle_residual(w, arg(e, 0), arg(e, 1), arg(e, 2));
            });
  add_entry(out,
            max_over("lemma_331_idempotent", spec.tolerances.at("lemma_331_idempotent"),
                     all_singles(window),
                     [&](const std::vector<GroupElement>& t) {
                       return units_idempotency_residual(w, t[0]);
                     }),
            [w](const LawEntry& e) { return units_idempotency_residual(w, arg(e, 0)); });

  VerificationReport kc =
      kernel_constancy_check(w, window, window, spec.tolerances.at("lemma_352_kernels"));
  for (LawEntry& e : kc.entries) {
    if (e.law == "lemma_352_kernels") {
      add_entry(out, std::move(e), [w](const LawEntry& s) {
        return kernel_agreement_residual(w, arg(s, 0), arg(s, 1), arg(s, 2));
      });
    } else {
      add_entry(out, std::move(e), [w](const LawEntry& s) {
        return std::abs(static_cast<double>(value_rank(w, arg(s, 0), arg(s, 1))) -
                        metric(s, "rank"));
      });
    }
  }

  const ProjectorMap pw = units_projector(w);
  add_entry(out,
            max_over("units_invariance", spec.tolerances.at("units_invariance"),
                     base_disp_pairs(window, window),
                     [&](const std::vector<GroupElement>& t) {
                       return invariance_residual(w, pw, t[0], t[1]);
                     }),
            [w, pw](const LawEntry& e) { return invariance_residual(w, pw, arg(e, 0), arg(e, 1)); });
}

void verify_partial(RunResult& out, const BuiltPartial& b, const ProblemSpec& spec,
                    const std::vector<GroupElement>& window) {
  partial_law_entries(out, b.w, spec, window);

  if (b.kind == "restrict" && b.restrict_base && b.projector) {
    const PartialCotranslation base = as_partial(*b.restrict_base);
    const ProjectorMap p = *b.projector;
    add_entry(out,
              max_over("projector_invariance", spec.tolerances.at("projector_invariance"),
                       base_disp_pairs(window, window),
                       [&](const std::vector<GroupElement>& t) {
                         return invariance_residual(base, p, t[0], t[1]);
                       }),
              [base, p](const LawEntry& e) {
                return invariance_residual(base, p, arg(e, 0), arg(e, 1));
              });
  }
  if (b.kind == "sum" && b.part_a && b.part_b) {
    const PartialCotranslation wa = *b.part_a, wb = *b.part_b, s = b.w;
    add_entry(out,
              max_over("orthogonality", spec.tolerances.at("orthogonality"),
                       base_disp_triples(window, window),
                       [&](const std::vector<GroupElement>& t) {
                         return mutual_orthogonality_residual(wa, wb, t[0], t[1], t[2]);
                       }),
              [wa, wb](const LawEntry& e) {
                return mutual_orthogonality_residual(wa, wb, arg(e, 0), arg(e, 1), arg(e, 2));
              });
    const ProjectorMap pa = units_projector(wa);
    add_entry(out,
              max_over("lemma_367_units", spec.tolerances.at("lemma_367_units"),
                       base_disp_pairs(window, window),
                       [&](const std::vector<GroupElement>& t) {
                         return invariance_residual(s, pa, t[0], t[1]);
                       }),
              [s, pa](const LawEntry& e) { return invariance_residual(s, pa, arg(e, 0), arg(e, 1)); });
    add_entry(out,
              max_over("lemma_367_restrict", spec.tolerances.at("lemma_367_restrict"),
                       base_disp_pairs(window, window),
                       [&](const std::vector<GroupElement>& t) {
                         return restriction_recovery_residual(s, wa, t[0], t[1]);
                       }),
              [s, wa](const LawEntry& e) {
                return restriction_recovery_residual(s, wa, arg(e, 0), arg(e, 1));
              });
  }
  if (b.kind == "conjugated" && b.conj_base && b.tmap) {
    const PartialCotranslation base = *b.conj_base, w = b.w;
    const ConjugationMap t = *b.tmap;
    VerificationReport ks = kinematic_similarity_report(base, w, t, window, window,
                                                        spec.tolerances.at("conjugation"));
    const Mat id = identity(w.dim());
    for (LawEntry& e : ks.entries) {
      if (e.law == "conjugation") {
        add_entry(out, std::move(e), [base, w, t](const LawEntry& s) {
          return conjugation_residual(base, w, t, arg(s, 0), arg(s, 1));
        });
      } else {
        add_entry(out, std::move(e), [t, id](const LawEntry& s) {
          return op_norm(sub(mul(t(arg(s, 0)), t.inv(arg(s, 0))), id));
        });
      }
    }
  }
}

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.dim(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.dim(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void complete_suite(RunResult& out, const BuiltPartial& b, const ProblemSpec& spec,
                    const std::vector<GroupElement>& window) {
  const PartialCotranslation& w = b.w;
  partial_law_entries(out, w, spec, window);

  NormalizedUnits nu = normalize_units(w, window, spec.tolerances.at("normalized_units"));
  const ConjugationMap nt = nu.t;
  const int rank = nu.rank;
  const int dim = w.dim();
  for (LawEntry& e : nu.report.entries) {
    if (e.law == "normalized_units") {
      add_entry(out, std::move(e), [w, nt, rank](const LawEntry& s) {
        return normalized_units_residual(w, nt, rank, arg(s, 0));
      });
    } else {
      add_entry(out, std::move(e), [nt, dim](const LawEntry& s) {
        return similarity_bound_excess(nt, dim, metric(s, "projector_bound"), arg(s, 0));
      });
    }
  }

  CompletionResult comp = complete(w, window, window, spec.tolerances.at("completion"));
  const PartialCotranslation v = comp.complement;
  const PartialCotranslation sum = as_partial(comp.full);
  const Cotranslation full = comp.full;
  for (LawEntry& e : comp.report.entries) {
    Replayer rep;
    if (e.law == "completion_orthogonality")
      rep = [w, v](const LawEntry& s) {
        return mutual_orthogonality_residual(w, v, arg(s, 0), arg(s, 1), arg(s, 2));
      };
    else if (e.law == "completion_law")
      rep = [sum](const LawEntry& s) {
        return partial_cocycle_residual(sum, arg(s, 0), arg(s, 1), arg(s, 2));
      };
    else if (e.law == "completion_rank")
      rep = [sum, dim](const LawEntry& s) {
        return static_cast<double>(dim - value_rank(sum, arg(s, 0), arg(s, 1)));
      };
    else if (e.law == "completion_invertible")
      rep = [full](const LawEntry& s) {
        return invertibility_residual(full, arg(s, 0), arg(s, 1));
      };
    else
      rep = [sum, w](const LawEntry& s) {
        return restriction_recovery_residual(sum, w, arg(s, 0), arg(s, 1));
      };
    add_entry(out, std::move(e), std::move(rep));
  }

  Json t_table = Json::array();
  for (const GroupElement& g : window)
    t_table.push_back(Json{{"g", g.str()}, {"matrix", mat_to_json(comp.t(g))}});
  Json v_entries = Json::array();
  for (const GroupElement& g : window)
    for (const GroupElement& h : window)
      v_entries.push_back(
          Json{{"g", g.str()}, {"h", h.str()}, {"matrix", mat_to_json(v(g, h))}});
  out.artifacts = Json{{"rank", comp.rank},
                       {"t", std::move(t_table)},
                       {"v", Json{{"kind", "explicit_values"}, {"entries", std::move(v_entries)}}}};
}

std::string format_csv(const EvolutionGrid& grid) {
  const std::int64_t n = grid.steps();
  const int d = grid.dim();
  const std::int64_t stride = std::max<std::int64_t>(1, n / 1000);
  std::ostringstream os;
  os << "t";
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) os << ",psi_" << r << "_" << c;
  os << "\n";
  char buf[40];
  Mat acc = identity(d);
  auto emit = [&](std::int64_t i, const Mat& m) {
    std::snprintf(buf, sizeof buf, "%.17g", grid.time_at(i));
    os << buf;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
        os << ',' << buf;
      }
    os << "\n";
  };
  emit(0, acc);
  for (std::int64_t i = 1; i <= n; ++i) {
    acc = mul(grid.step_matrix(i - 1), acc);
    if (i % stride == 0 || i == n) emit(i, acc);
  }
  return os.str();
}

void evolve_suite(RunResult& out, const Json& ode, const ProblemSpec& spec, bool full_suite) {
  CoeffFn coeff = parse_coeff(ode.at("coeff"), "spec.ode.coeff", spec.max_dim);
  const double t0 = require_number(ode, "spec.ode", "t0");
  const double t1 = require_number(ode, "spec.ode", "t1");
  const double h = require_number(ode, "spec.ode", "h");
  const double h_fd = optional_number(ode, "h_fd", 1e-2);
  if (h_fd <= 0.0) fail("spec.ode.h_fd", "finite-difference step must be positive");

  const EvolutionGrid grid = EvolutionGrid::integrate(coeff, t0, t1, h);
  const Cotranslation z = cotranslation_of(grid);
  const std::int64_t n = grid.steps();

  if (full_suite) {
    {
      VerificationReport sc = check_step_consistency(grid, spec.tolerances.at("step_consistency"));
      add_entry(out, std::move(sc.entries.front()), [grid](const LawEntry& s) {
        return step_consistency_residual(grid, arg(s, 0).as_int());
      });
    }
    {
      VerificationReport pc =
          check_psi_cocycle(grid, 200, spec.seed, spec.tolerances.at("psi_cocycle"));
      add_entry(out, std::move(pc.entries.front()), [grid](const LawEntry& s) {
        return psi_cocycle_residual(grid, arg(s, 0).as_int(), arg(s, 1).as_int(),
                                    arg(s, 2).as_int());
      });
    }
    const GridWindows gw = grid_windows(grid, spec.radius);
    add_cocycle_entries(out, z, spec, gw.bases, gw.disps);
  }

  // Finite-difference sample points, kept far enough from the grid ends for
  // every composition the identities and the probe rays form.
  const std::int64_t mm = std::llround(h_fd / h);
  const std::int64_t margin = 4 * mm + 2;
  const bool fd_usable = mm >= 2 && mm % 2 == 0 &&
                         std::abs(static_cast<double>(mm) * h - h_fd) <=
                             1e-9 * std::max(1.0, h_fd) &&
                         n - margin >= margin;
  if (!fd_usable) {
    const std::string reason =
        "finite-difference suite skipped: h_fd must be an even positive multiple of the grid "
        "step with interior margin on the grid";
    if (!full_suite) throw SpecError(reason);
    LawEntry skip;
    skip.law = "generator_recovery";
    skip.note = reason;
    out.report.entries.push_back(std::move(skip));
    out.csv = format_csv(grid);
    return;
  }
  std::vector<std::int64_t> fd_bases;
  const std::int64_t span = n - 2 * margin;
  for (int i = 0; i < 8; ++i) {
    const std::int64_t b = margin + (span * i) / 8;
    if (fd_bases.empty() || fd_bases.back() != b) fd_bases.push_back(b);
  }
  std::vector<std::pair<std::int64_t, std::int64_t>> fd_points;
  for (const std::int64_t b : fd_bases)
    for (const std::int64_t j : {-mm, std::int64_t{0}, mm}) fd_points.emplace_back(b, j);

  add_entry(out,
            check_generator_recovery(grid, z, fd_bases, h_fd,
                                     spec.tolerances.at("generator_recovery")),
            [grid, z, h_fd](const LawEntry& s) {
              return generator_recovery_residual(grid, z, arg(s, 0).as_int(), h_fd);
            });

  VerificationReport ids = check_derivative_identities(z, fd_points, h_fd);
  for (LawEntry& e : ids.entries)
    add_entry(out, std::move(e), [z, h_fd](const LawEntry& s) {
      return derivative_identity_residual(z, s.law, arg(s, 0).as_int(), arg(s, 1).as_int(), h_fd);
    });

  VerificationReport probe = two_variable_differentiability_probe(
      z, fd_points, h_fd, spec.tolerances.at("two_variable_probe"));
  add_entry(out, std::move(probe.entries.front()), [z, h_fd](const LawEntry& s) {
    return two_variable_probe_residual(z, arg(s, 0).as_int(), arg(s, 1).as_int(), h_fd);
  });

  out.csv = format_csv(grid);
}

}  // namespace

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tols = {
      {"cocycle", 1e-10},           {"unit", 1e-10},
      {"involution", 1e-10},        {"autonomy", 1e-9},
      {"morphism", 1e-9},           {"relations", 1e-9},
      {"commutation", 1e-9},        {"partial_law", 1e-9},
      {"lemma_331_idempotent", 1e-9}, {"lemma_352_kernels", 1e-8},
      {"units_invariance", 1e-9},   {"projector_invariance", 1e-9},
      {"orthogonality", 1e-9},      {"lemma_367_units", 1e-9},
      {"lemma_367_restrict", 1e-9}, {"conjugation", 1e-9},
      {"normalized_units", 1e-8},   {"completion", 1e-9},
      {"hull_admissible", 1e-10},   {"hull_axiom_iii", 1e-10},
      {"hull_roundtrip", 0.0},      {"psi_cocycle", 1e-9},
      {"step_consistency", 1e-7},   {"generator_recovery", 5e-4},
      {"two_variable_probe", 1e-5},
  };
  return tols;
}

const std::vector<LawInfo>& known_laws() {
  static const std::vector<LawInfo> laws = {
      {"cocycle", 1e-10, false, "composition law Z(g,kh) = Z(hg,k) Z(g,h)"},
      {"unit", 1e-10, false, "unit law Z(g,e) = Id"},
      {"involution", 1e-10, false, "inverse law Z(g,h)^-1 = Z(hg,h^-1)"},
      {"autonomy", 1e-9, true, "base-point dependence of Z(.,h) (recorded, never fails)"},
      {"morphism", 1e-9, false, "gamma(ab) = gamma(a) gamma(b) for autonomous families"},
      {"relations", 1e-9, false, "generator maps preserve the declared group relations"},
      {"commutation", 1e-9, false, "shift morphism commutes with the base family"},
      {"hull_admissible", 1e-10, false, "hull slices satisfy psi_g(e) = Id"},
      {"hull_axiom_iii", 1e-10, false, "hull shift compatibility psi_hg(k) psi_g(h) = psi_g(kh)"},
      {"hull_roundtrip", 0.0, false, "hull <-> cotranslation round trip is exact"},
      {"partial_law", 1e-9, false, "composition law for possibly singular values"},
      {"lemma_331_idempotent", 1e-9, false, "unit slices W(g,e) are idempotent"},
      {"lemma_352_kernels", 1e-8, false, "kernels of W(h,.) agree across displacements"},
      {"prop_366_rank", 0.5, false, "rank of the values is constant over the window"},
      {"units_invariance", 1e-9, false, "units projector is invariant for W"},
      {"projector_invariance", 1e-9, false, "declared projector is invariant for the base"},
      {"orthogonality", 1e-9, false, "summands annihilate each other in both orders"},
      {"lemma_367_units", 1e-9, false, "summand units projector stays invariant for the sum"},
      {"lemma_367_restrict", 1e-9, false, "restricting the sum recovers the summand"},
      {"conjugation", 1e-9, false, "T(hg) V(g,h) = W(g,h) T(g)"},
      {"t_invertibility", 1e-9, false, "T values invert cleanly; sup norms recorded"},
      {"normalized_units", 1e-8, false, "T^-1 W(g,e) T equals the constant block diag(Id_r,0)"},
      {"prop_411_bounds", 1e-9, false, "||T|| <= d and ||T^-1|| <= d*M over the window"},
      {"completion_orthogonality", 1e-9, false, "complement is orthogonal to the input"},
      {"completion_law", 1e-9, false, "W + V satisfies the composition law"},
      {"completion_rank", 0.5, false, "W + V has full rank everywhere"},
      {"completion_invertible", 1e-9, false, "W + V inverts cleanly"},
      {"completion_reconstruction", 1e-9, false, "restricting W + V to the units of W gives W"},
      {"psi_cocycle", 1e-9, false, "Psi(u,v) Psi(v,w) = Psi(u,w) on sampled triples"},
      {"step_consistency", 1e-7, false, "one step agrees with two half steps"},
      {"generator_recovery", 5e-4, false, "central difference recovers the coefficient A(t)"},
      {"lemma_147", 1e-9, false, "d1 Z = d2 Z - Z d2 Z(.,0); second-order convergence"},
      {"lemma_153", 1e-9, false, "d1 of the inverse family; second-order convergence"},
      {"lemma_165", 1e-9, false, "d2 Z = A(r+t) Z; second-order convergence"},
      {"lemma_171", 1e-9, false, "d2 of the inverse family; second-order convergence"},
      {"prop_178_iii", 1e-9, false, "d/dv Psi(u,v) = -Psi(u,v) A(v); second-order convergence"},
      {"two_variable_probe", 1e-5, true, "joint quotients vs. linearization (recorded only)"},
      {"construction", 0.0, false, "placeholder entry for a failed construction"},
  };
  return laws;
}

RunResult execute(const ProblemSpec& spec) {
  RunResult out;
  out.command = spec.command;
  const auto started = std::chrono::steady_clock::now();

  try {
    if (spec.doc.contains("ode")) {
      if (spec.command == "evolve" || spec.command == "verify")
        evolve_suite(out, spec.doc.at("ode"), spec, true);
      else if (spec.command == "generator")
        evolve_suite(out, spec.doc.at("ode"), spec, false);
      else
        throw SpecError("command '" + spec.command + "' is not defined for an ode object");
    } else {
      const GroupHandle grp = parse_group(spec.doc.at("group"), "spec.group");
      const std::vector<GroupElement> window = grp.window(spec.radius, spec.seed);
      if (spec.doc.contains("cotranslation")) {
        BuiltCot b = build_cotranslation(spec.doc.at("cotranslation"), grp, spec, window,
                                         "spec.cotranslation");
        if (spec.command == "verify")
          verify_cotranslation(out, b, grp, spec, window);
        else if (spec.command == "skew-roundtrip")
          roundtrip_cotranslation(out, b, spec, window);
        else
          throw SpecError("command '" + spec.command +
                          "' is not defined for a cotranslation object");
      } else if (spec.doc.contains("partial")) {
        BuiltPartial b = build_partial(spec.doc.at("partial"), grp, spec, window, "spec.partial");
        if (spec.command == "verify")
          verify_partial(out, b, spec, window);
        else if (spec.command == "complete")
          complete_suite(out, b, spec, window);
        else
          throw SpecError("command '" + spec.command + "' is not defined for a partial object");
      } else {
        Hull h = build_hull(spec.doc.at("hull"), grp, spec, window, "spec.hull");
        if (spec.command == "verify")
          verify_hull(out, h, spec, window, false);
        else if (spec.command == "skew-roundtrip")
          verify_hull(out, h, spec, window, true);
        else
          throw SpecError("command '" + spec.command + "' is not defined for a hull object");
      }
    }
  } catch (const ConstructionError& e) {
    LawEntry pseudo;
    pseudo.law = "construction";
    pseudo.pass = false;
    pseudo.note = e.what();
    out.report.entries.push_back(std::move(pseudo));
  } catch (const CompletionError& e) {
    LawEntry pseudo;
    pseudo.law = "construction";
    pseudo.pass = false;
    pseudo.note = e.what();
    out.report.entries.push_back(std::move(pseudo));
  } catch (const SingularError& e) {
    LawEntry pseudo;
    pseudo.law = "construction";
    pseudo.pass = false;
    pseudo.note = e.what();
    out.report.entries.push_back(std::move(pseudo));
  }

  out.report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  out.exit_code = out.report.aggregate_pass() ? 0 : 1;
  return out;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"verifies cotranslation laws described by a JSON problem spec"};
  Options opt;
  std::vector<std::string> tol_args;
  int radius_arg = 0;
  std::uint64_t seed_arg = 0;
  app.add_option("--spec", opt.spec_path, "problem spec JSON file");
  app.add_option("--out", opt.out_path, "write the report here instead of stdout");
  app.add_option("--csv", opt.csv_path, "dump evolution trajectories as CSV");
  app.add_option("--replay", opt.replay_path, "re-check a recorded report against --spec");
  auto* radius_opt = app.add_option("--radius", radius_arg, "window radius override");
  auto* seed_opt = app.add_option("--seed", seed_arg, "seed override");
  app.add_option("--tol", tol_args, "tolerance override KEY=VAL (repeatable)");
  app.add_flag("--list-laws", opt.list_laws, "print the law registry and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  }

  if (opt.list_laws) {
    for (const LawInfo& info : known_laws()) {
      std::cout << info.id << "\t";
      if (info.informational)
        std::cout << "informational";
      else
        std::cout << "tol=" << info.default_tol;
      std::cout << "\t" << info.summary << "\n";
    }
    return 0;
  }

  try {
    if (*radius_opt) opt.radius = radius_arg;
    if (*seed_opt) opt.seed = seed_arg;
    for (const std::string& kv : tol_args) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw SpecError("--tol: expected KEY=VAL, got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      char* end = nullptr;
      const double val = std::strtod(kv.c_str() + eq + 1, &end);
      if (!end || *end != '\0' || kv.size() == eq + 1)
        throw SpecError("--tol " + key + ": expected a number");
      opt.tol_overrides[key] = val;
    }
    if (opt.spec_path.empty()) throw SpecError("--spec is required");

    const ProblemSpec spec = load_spec(opt.spec_path, opt);
    if (!opt.csv_path.empty() && !spec.doc.contains("ode"))
      throw SpecError("--csv: trajectories are only produced for ode objects");

    if (!opt.replay_path.empty()) {
      std::ifstream in(opt.replay_path);
      if (!in) throw SpecError("--replay: cannot open '" + opt.replay_path + "'");
      Json report_doc;
      try {
        report_doc = Json::parse(in);
      } catch (const Json::parse_error& e) {
        throw SpecError(std::string("--replay: invalid JSON: ") + e.what());
      }
      std::string why;
      const bool ok = replay(report_doc, spec, &why);
      Json result{{"replay", ok}};
      if (!ok) result["detail"] = why;
      std::cout << result.dump(2) << "\n";
      return ok ? 0 : 1;
    }

    const RunResult result = execute(spec);
    const Json doc = report_to_json(result, spec);
    if (opt.out_path.empty()) {
      std::cout << doc.dump(2) << "\n";
    } else {
      std::ofstream os(opt.out_path);
      if (!os) throw SpecError("--out: cannot write '" + opt.out_path + "'");
      os << doc.dump(2) << "\n";
    }
    if (!opt.csv_path.empty()) {
      std::ofstream cs(opt.csv_path);
      if (!cs) throw SpecError("--csv: cannot write '" + opt.csv_path + "'");
      cs << result.csv;
    }
    return result.exit_code;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace cotran::harness
