#include "theta10/dlledger.hpp"

#include <algorithm>
#include <stdexcept>

namespace theta10 {

namespace {

long mod(long a, long m) {
  const long r = a % m;
  return r < 0 ? r + m : r;
}

struct LinearSolve {
  bool consistent = false;
  int rank = 0;
  int unknowns = 0;
  std::vector<Rat> solution;
  bool unique() const { return consistent && rank == unknowns; }
};

// Gaussian elimination on [A | b] over Q.
LinearSolve solve(std::vector<std::vector<Rat>> a, std::vector<Rat> b, int unknowns) {
  LinearSolve r;
  r.unknowns = unknowns;
  const std::size_t rows = a.size();
  std::vector<int> pivot_col;
  std::size_t rank = 0;
  for (int col = 0; col < unknowns && rank < rows; ++col) {
    std::size_t piv = rank;
    while (piv < rows && sgn(a[piv][static_cast<std::size_t>(col)]) == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[rank]);
    std::swap(b[piv], b[rank]);
    const Rat inv = Rat(1) / a[rank][static_cast<std::size_t>(col)];
    for (auto& v : a[rank]) v *= inv;
    b[rank] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank || sgn(a[i][static_cast<std::size_t>(col)]) == 0) continue;
      const Rat f = a[i][static_cast<std::size_t>(col)];
      for (int k = 0; k < unknowns; ++k) a[i][static_cast<std::size_t>(k)] -= f * a[rank][static_cast<std::size_t>(k)];
      b[i] -= f * b[rank];
    }
    pivot_col.push_back(col);
    ++rank;
  }
  r.rank = static_cast<int>(rank);
  r.consistent = true;
  for (std::size_t i = rank; i < rows; ++i) {
    if (sgn(b[i]) != 0) r.consistent = false;
  }
  if (r.consistent) {
    r.solution.assign(static_cast<std::size_t>(unknowns), Rat(0));
    for (std::size_t i = 0; i < rank; ++i) r.solution[static_cast<std::size_t>(pivot_col[i])] = b[i];
  }
  return r;
}

nlohmann::ordered_json rat_json(const Rat& r) {
  if (r.get_den() == 1 && r.get_num().fits_slong_p()) return r.get_num().get_si();
  return r.get_str();
}

nlohmann::ordered_json axiom_ref(const std::string& name) {
  return {{"kind", "axiom"}, {"name", ledger_axiom(name).name}};
}

nlohmann::ordered_json computation_ref(const std::string& name) { return {{"kind", "computation"}, {"name", name}}; }

}  // namespace

std::vector<TorusChar> torus_characters(int q) {
  const int n = q * q + 1;
  std::vector<TorusChar> out;
  for (int k = 0; k < n; ++k) {
    bool fixed = false;
    long kk = k;
    for (int step = 1; step < 4; ++step) {
      kk = mod(kk * q, n);
      if (kk == k) fixed = true;
    }
    out.push_back(TorusChar{k, n, !fixed});
  }
  return out;
}

WeylOrbitReport weyl_orbit_structure(int q) {
  WeylOrbitReport r;
  r.q = q;
  const int n = q * q + 1;
  r.characters = n;
  const auto chars = torus_characters(q);
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  r.frobenius_order_four = true;
  r.q4_acts_trivially = true;
  for (const auto& c : chars) {
    const long q4 = mod(static_cast<long>(q) * q % n * q % n * q, n);
    if (mod(q4 * c.k, n) != c.k) r.q4_acts_trivially = false;
    if (c.regular) ++r.regular;
    else if (mod(static_cast<long>(c.k) * q, n) == c.k) r.nonregular.push_back(c.k);
    if (seen[static_cast<std::size_t>(c.k)]) continue;
    std::vector<int> orbit;
    for (long kk = c.k; !seen[static_cast<std::size_t>(kk)]; kk = mod(kk * q, n)) {
      seen[static_cast<std::size_t>(kk)] = true;
      orbit.push_back(static_cast<int>(kk));
    }
    std::sort(orbit.begin(), orbit.end());
    if (c.regular && orbit.size() != 4) r.frobenius_order_four = false;
    r.orbits.push_back(std::move(orbit));
  }
  return r;
}

RtDimension rt_dimension(int q) {
  RtDimension r;
  const std::uint64_t qq = static_cast<std::uint64_t>(q);
  r.u0_order = qq * qq * qq * qq;
  r.group_order = r.u0_order * (qq * qq - 1) * (qq * qq * qq * qq - 1);
  r.torus_order = qq * qq + 1;
  // (-1)^{split rank}: Sp(4) has split rank 2, the anisotropic torus 0.
  r.eps_g = 1;
  r.eps_t = 1;
  const std::uint64_t denom = r.u0_order * r.torus_order;
  if (r.group_order % denom != 0) throw std::logic_error("R_{T,theta} dimension is not an integer");
  r.value = r.eps_g * r.eps_t * static_cast<long>(r.group_order / denom);
  r.closed_form = static_cast<long>((qq * qq - 1) * (qq * qq - 1));
  return r;
}

bool TorusRow::pass() const {
  if (plus_minus_one) return true;
  return eigenvalues_distinct && no_eigenvalue_pm1 && eta_pattern && theta10.is_one();
}

TorusTable torus_values_check(const Analysis& analysis) {
  const WeilEngine& e = analysis.engine();
  const auto& grp = e.group();
  const auto& f = grp.field();
  const auto& orth = grp.tower().orth();
  const AnisotropicTorus torus = anisotropic_torus(grp);
  TorusTable table;
  table.q = e.q();
  table.all_pass = true;
  const SpMat one = grp.identity(), minus = grp.minus_identity();
  for (std::size_t j = 0; j < torus.elements.size(); ++j) {
    const SpMat& s = torus.elements[j];
    TorusRow row;
    row.j = static_cast<int>(j);
    row.plus_minus_one = s == one || s == minus;
    const GFElem gamma = torus.zeta.pow(static_cast<long>(j));
    const GFElem gq = gamma.frobenius(1);
    std::vector<std::uint32_t> eig = {gamma.code(), gq.code(), gamma.inverse().code(), gq.inverse().code()};
    std::sort(eig.begin(), eig.end());
    row.eigenvalues_distinct = std::adjacent_find(eig.begin(), eig.end()) == eig.end();
    row.no_eigenvalue_pm1 = grp.det_shift(s, 1) != 0 && grp.det_shift(s, f.neg(1)) != 0;
    if (!row.plus_minus_one) {
      row.eta_pattern = true;
      for (int t = 0; t < orth.order(); ++t) {
        const auto v = e.eta_fast(s, t);
        row.eta.push_back(v ? *v : 0);
        if (!v || *v != orth.sign(t)) row.eta_pattern = false;
      }
      row.theta10 = analysis.theta10(s);
      ++table.regular_count;
    } else {
      row.theta10 = analysis.theta10(s);
    }
    if (!row.pass()) table.all_pass = false;
    table.rows.push_back(std::move(row));
  }
  return table;
}

const std::vector<LedgerAxiom>& ledger_axioms() {
  static const std::vector<LedgerAxiom> axioms = {
      {"strong_orthogonality",
       "R_{T,theta} and R_{T',theta'} share no irreducible constituent unless (T,theta) and (T',theta') are "
       "geometrically conjugate; (T,1) and (T,mu) are not geometrically conjugate"},
      {"regular_implies_irreducible", "for theta in general position (not fixed by any nontrivial element of W(T)^F), "
                                      "+R_{T,theta} or -R_{T,theta} is an irreducible character"},
      {"rt_dimension", "R_{T,theta}(1) = eps_G eps_T |G^F| / (|U0^F| |T^F|)"},
      {"rss_specialization", "for s in T^F regular semisimple and rho irreducible, "
                             "rho(s) = sum_theta theta(s) <rho, R_{T,theta}>"},
  };
  return axioms;
}

const LedgerAxiom& ledger_axiom(const std::string& name) {
  for (const auto& a : ledger_axioms()) {
    if (a.name == name) return a;
  }
  throw std::invalid_argument("unknown ledger axiom: " + name);
}

DeductionResult unipotence_deduction(const TorusTable& table, long theta10_dim) {
  DeductionResult r;
  const int q = table.q;
  const int n = q * q + 1;
  const int mu = n / 2;
  int step = 0;
  auto push = [&](std::string claim, nlohmann::ordered_json just, nlohmann::ordered_json data) {
    r.transcript.push_back({{"step", ++step}, {"claim", std::move(claim)}, {"justification", std::move(just)}, {"data", std::move(data)}});
  };

  // Regular elements and their theta10 values.
  std::vector<int> regular_j;
  std::vector<Rat> rhs;
  bool values_ok = true;
  for (const auto& row : table.rows) {
    if (row.plus_minus_one) continue;
    regular_j.push_back(row.j);
    if (!row.theta10.is_rational()) {
      values_ok = false;
      continue;
    }
    rhs.push_back(row.theta10.to_rational());
  }
  {
    nlohmann::ordered_json vals = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < rhs.size(); ++i) vals.push_back({{"j", regular_j[i]}, {"theta10", rat_json(rhs[i])}});
    push("every s in T^F other than +-1 is regular semisimple, with the theta10 values listed", computation_ref("torus_values_check"),
         {{"regular_elements", static_cast<long>(regular_j.size())}, {"all_checks_pass", table.all_pass && values_ok}, {"values", vals}});
  }
  if (!values_ok || regular_j.empty()) {
    r.conclusion = "deduction failed: torus values unavailable";
    return r;
  }

  push("theta10(s) = sum_k theta_k(s) m_k with m_k = <theta10, R_{T,theta_k}>, for every regular s", axiom_ref("rss_specialization"),
       {{"equations", static_cast<long>(regular_j.size())}, {"unknowns", n}});

  const WeylOrbitReport weyl = weyl_orbit_structure(q);
  push("the non-regular characters of T^F are exactly the trivial character and mu", computation_ref("weyl_orbit_structure"),
       {{"characters", weyl.characters}, {"regular", weyl.regular}, {"nonregular", weyl.nonregular}});
  const bool nonregular_ok = weyl.nonregular == std::vector<int>{0, mu};

  const RtDimension dim = rt_dimension(q);
  push("R_{T,theta} has dimension (q^2-1)^2, which differs from dim theta10", axiom_ref("rt_dimension"),
       {{"rt_dimension", dim.value}, {"closed_form", dim.closed_form}, {"theta10_dimension", theta10_dim}});
  const bool dims_differ = dim.value != theta10_dim && dim.value == dim.closed_form;

  push("for regular theta, +-R_{T,theta} is irreducible of the wrong dimension, so m_theta = 0; "
       "this reads the irreducible virtual character as having a single constituent",
       axiom_ref("regular_implies_irreducible"), {{"eliminated", weyl.regular}, {"applies", dims_differ}});

  push("theta10 cannot occur in both R_{T,1} and R_{T,mu}, so the support of m is empty, {1} or {mu}",
       axiom_ref("strong_orthogonality"), {{"geometric_conjugacy_of_1_and_mu", "asserted, not re-verified"}});

  struct Candidate {
    std::string name;
    std::vector<int> ks;
  };
  const std::vector<Candidate> candidates = {{"empty", {}}, {"{1}", {0}}, {"{mu}", {mu}}};
  auto value = [&](int k, int j) { return k == 0 ? Rat(1) : Rat(j % 2 == 0 ? 1 : -1); };
  int feasible = 0;
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (const auto& c : candidates) {
    const int m = static_cast<int>(c.ks.size());
    std::vector<std::vector<Rat>> a(regular_j.size(), std::vector<Rat>(static_cast<std::size_t>(m)));
    for (std::size_t i = 0; i < regular_j.size(); ++i)
      for (int k = 0; k < m; ++k) a[i][static_cast<std::size_t>(k)] = value(c.ks[static_cast<std::size_t>(k)], regular_j[i]);
    const LinearSolve s = solve(a, rhs, m);
    bool integral_nonzero = s.consistent;
    nlohmann::ordered_json sol = nlohmann::ordered_json::array();
    for (const auto& v : s.solution) {
      sol.push_back(rat_json(v));
      if (v.get_den() != 1 || sgn(v) == 0) integral_nonzero = false;
    }
    const bool ok = s.unique() && integral_nonzero;
    if (ok) {
      ++feasible;
      r.m_trivial = 0;
      r.m_mu = 0;
      for (int k = 0; k < m; ++k) {
        const long v = s.solution[static_cast<std::size_t>(k)].get_num().get_si();
        if (c.ks[static_cast<std::size_t>(k)] == 0) r.m_trivial = v;
        else r.m_mu = v;
      }
    }
    cases.push_back({{"support", c.name}, {"consistent", s.consistent}, {"rank", s.rank}, {"unknowns", m}, {"solution", sol}, {"feasible", ok}});
  }
  push("solve the specialized equations on each admissible support", computation_ref("exact linear solve over Q"), {{"cases", cases}});

  // Without the support restriction the two non-regular unknowns are still pinned.
  {
    std::vector<std::vector<Rat>> a(regular_j.size(), std::vector<Rat>(2));
    for (std::size_t i = 0; i < regular_j.size(); ++i) {
      a[i][0] = value(0, regular_j[i]);
      a[i][1] = value(mu, regular_j[i]);
    }
    const LinearSolve s = solve(a, rhs, 2);
    nlohmann::ordered_json sol = nlohmann::ordered_json::array();
    for (const auto& v : s.solution) sol.push_back(rat_json(v));
    push("cross-check: the system on the unrestricted support {1, mu} has rank 2", computation_ref("exact linear solve over Q"),
         {{"consistent", s.consistent}, {"rank", s.rank}, {"solution", sol}});
  }

  r.unique = feasible == 1 && nonregular_ok && dims_differ && table.all_pass;
  if (r.unique && r.m_trivial == 1 && r.m_mu == 0) {
    r.conclusion = "<theta10, R_{T,1}> = 1, so theta10 is unipotent";
  } else {
    r.conclusion = "deduction failed";
  }
  push(r.conclusion, computation_ref("deduction"), {{"m_trivial", r.m_trivial}, {"m_mu", r.m_mu}, {"unique", r.unique}});
  return r;
}

}  // namespace theta10
