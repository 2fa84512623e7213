#include "pqcm/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace pqcm::fock {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double sqrt_factorial_product(const Occupation& occ) {
  double p = 1.0;
  for (int n : occ) p *= factorial(n);
  return std::sqrt(p);
}

void require_layout(const FockVector& s, int spatial, const char* where) {
  if (s.layout().spatial != spatial) {
    throw std::invalid_argument(std::string(where) + ": expected " + std::to_string(spatial) +
                                " spatial mode(s)");
  }
}

// Columns are the new basis kets {e0, e1} in the old basis; returns the
// substitution matrix a_old_p^dagger = sum_q conj(e_q[p]) a_new_q^dagger.
CMatrix substitution_for_basis(const StateVector& e0, const StateVector& e1) {
  CMatrix b(2, 2);
  for (int p = 0; p < 2; ++p) {
    b(p, 0) = std::conj(e0[static_cast<std::size_t>(p)]);
    b(p, 1) = std::conj(e1[static_cast<std::size_t>(p)]);
  }
  return b;
}

}  // namespace

int total_photons(const Occupation& occ) { return std::accumulate(occ.begin(), occ.end(), 0); }

FockVector::FockVector(ModeLayout layout, int cutoff) : layout_(layout), cutoff_(cutoff) {
  if (layout.spatial < 1 || layout.tags < 1) throw std::invalid_argument("FockVector: bad layout");
  if (cutoff < 0) throw std::invalid_argument("FockVector: negative cutoff");
}

FockVector FockVector::vacuum(ModeLayout layout, int cutoff) {
  FockVector v(layout, cutoff);
  v.add(Occupation(static_cast<std::size_t>(layout.slots()), 0), 1.0);
  return v;
}

void FockVector::add(const Occupation& occ, Complex amp) {
  if (static_cast<int>(occ.size()) != layout_.slots()) {
    throw std::invalid_argument("FockVector::add: occupation has wrong number of slots");
  }
  if (total_photons(occ) > cutoff_) {
    throw CutoffExceeded("FockVector: " + std::to_string(total_photons(occ)) +
                         " photons exceed cutoff " + std::to_string(cutoff_));
  }
  if (amp == Complex(0.0)) return;
  terms_[occ] += amp;
}

Complex FockVector::amplitude(const Occupation& occ) const {
  const auto it = terms_.find(occ);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

double FockVector::norm_squared() const {
  double n = 0.0;
  for (const auto& [occ, a] : terms_) n += std::norm(a);
  return n;
}

FockVector FockVector::normalized() const {
  const double n = std::sqrt(norm_squared());
  if (n == 0.0) throw std::domain_error("FockVector::normalized: zero vector");
  return scaled(1.0 / n).pruned();
}

FockVector FockVector::scaled(Complex s) const {
  FockVector out(layout_, cutoff_);
  for (const auto& [occ, a] : terms_) out.add(occ, s * a);
  return out;
}

FockVector FockVector::operator+(const FockVector& rhs) const {
  if (!(layout_ == rhs.layout_)) throw std::invalid_argument("FockVector: layout mismatch");
  FockVector out = *this;
  out.cutoff_ = std::max(cutoff_, rhs.cutoff_);
  for (const auto& [occ, a] : rhs.terms_) out.add(occ, a);
  return out;
}

FockVector FockVector::operator-(const FockVector& rhs) const { return *this + rhs.scaled(-1.0); }

FockVector FockVector::pruned(double tol) const {
  FockVector out(layout_, cutoff_);
  for (const auto& [occ, a] : terms_)
    if (std::abs(a) >= tol) out.terms_.emplace(occ, a);
  return out;
}

FockVector FockVector::sector(int photons) const {
  FockVector out(layout_, cutoff_);
  for (const auto& [occ, a] : terms_)
    if (total_photons(occ) == photons) out.terms_.emplace(occ, a);
  return out;
}

Occupation FockVector::occupation(std::initializer_list<std::array<int, 4>> entries) const {
  Occupation occ(static_cast<std::size_t>(layout_.slots()), 0);
  for (const auto& e : entries) {
    if (e[0] < 0 || e[0] >= layout_.tags || e[1] < 0 || e[1] >= layout_.spatial || e[2] < 0 ||
        e[2] > 1) {
      throw std::invalid_argument("FockVector::occupation: mode out of range");
    }
    occ[static_cast<std::size_t>(layout_.slot(e[0], e[1], static_cast<Pol>(e[2])))] += e[3];
  }
  return occ;
}

FockVector create(const FockVector& state, int slot) {
  FockVector out(state.layout(), state.cutoff());
  for (const auto& [occ, a] : state.terms()) {
    Occupation next = occ;
    const int n = next.at(static_cast<std::size_t>(slot));
    next[static_cast<std::size_t>(slot)] = n + 1;
    out.add(next, a * std::sqrt(static_cast<double>(n + 1)));
  }
  return out;
}

FockVector annihilate(const FockVector& state, int slot) {
  FockVector out(state.layout(), state.cutoff());
  for (const auto& [occ, a] : state.terms()) {
    const int n = occ.at(static_cast<std::size_t>(slot));
    if (n == 0) continue;
    Occupation next = occ;
    next[static_cast<std::size_t>(slot)] = n - 1;
    out.add(next, a * std::sqrt(static_cast<double>(n)));
  }
  return out;
}

FockVector transform_modes(const FockVector& state, const CMatrix& u, ModeLayout outLayout) {
  const auto inSlots = static_cast<Eigen::Index>(state.layout().slots());
  const auto outSlots = static_cast<Eigen::Index>(outLayout.slots());
  if (u.rows() != inSlots || u.cols() != outSlots) {
    throw std::invalid_argument("transform_modes: matrix shape does not match layouts");
  }
  FockVector out(outLayout, state.cutoff());
  for (const auto& [occ, amp] : state.terms()) {
    // Creation-operator monomial: amp / sqrt(prod n!) * prod (a_i^dagger)^{n_i}.
    std::map<Occupation, Complex> poly;
    poly[Occupation(static_cast<std::size_t>(outSlots), 0)] = amp / sqrt_factorial_product(occ);
    for (Eigen::Index i = 0; i < inSlots; ++i) {
      for (int rep = 0; rep < occ[static_cast<std::size_t>(i)]; ++rep) {
        std::map<Occupation, Complex> next;
        for (const auto& [mono, c] : poly) {
          for (Eigen::Index j = 0; j < outSlots; ++j) {
            if (u(i, j) == Complex(0.0)) continue;
            Occupation m = mono;
            ++m[static_cast<std::size_t>(j)];
            next[m] += c * u(i, j);
          }
        }
        poly = std::move(next);
      }
    }
    for (const auto& [mono, c] : poly) out.add(mono, c * sqrt_factorial_product(mono));
  }
  return out.pruned();
}

bool ModeMap::is_unitary(double tol) const {
  return std::all_of(perPolarization.begin(), perPolarization.end(), [tol](const CMatrix& m) {
    return LinearMap(m).is_unitary(tol);
  });
}

CMatrix ModeMap::expand(const ModeLayout& layout) const {
  if (layout.spatial != 2) throw std::invalid_argument("ModeMap::expand: needs two spatial modes");
  const auto n = static_cast<Eigen::Index>(layout.slots());
  CMatrix m = CMatrix::Zero(n, n);
  for (int t = 0; t < layout.tags; ++t) {
    for (int p = 0; p < 2; ++p) {
      const auto pol = static_cast<Pol>(p);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          m(layout.slot(t, i, pol), layout.slot(t, j, pol)) = perPolarization[p](i, j);
        }
      }
    }
  }
  return m;
}

ModeMap balanced_beamsplitter() {
  const double r = std::numbers::sqrt2 / 2;
  const Complex i{0.0, 1.0};
  CMatrix s(2, 2);
  s << r, i * r, i * r, r;
  return ModeMap{{s, s}};
}

FockVector change_polarization_basis(const FockVector& state, const CMatrix& basis) {
  if (basis.rows() != 2 || basis.cols() != 2) {
    throw std::invalid_argument("change_polarization_basis: expected a 2x2 matrix");
  }
  const ModeLayout& l = state.layout();
  const auto n = static_cast<Eigen::Index>(l.slots());
  CMatrix m = CMatrix::Zero(n, n);
  for (int t = 0; t < l.tags; ++t)
    for (int s = 0; s < l.spatial; ++s)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q)
          m(l.slot(t, s, static_cast<Pol>(p)), l.slot(t, s, static_cast<Pol>(q))) = basis(p, q);
  return transform_modes(state, m, l);
}

void OpaConfig::validate() const {
  if (!(gain > 0.0)) throw std::invalid_argument("OpaConfig: gain must be positive");
  if (gain >= 1.0) throw std::invalid_argument("OpaConfig: first-order expansion needs gain < 1");
  if (cutoff < 3) throw std::invalid_argument("OpaConfig: cutoff must be at least 3");
}

FockVector first_order_emission(const FockVector& state, double gain, int tag) {
  require_layout(state, 2, "first_order_emission");
  const ModeLayout& l = state.layout();
  if (tag < 0 || tag >= l.tags) throw std::invalid_argument("first_order_emission: bad tag");
  const int a1 = l.slot(tag, 0, Pol::Phi), a1p = l.slot(tag, 0, Pol::Perp);
  const int a2 = l.slot(tag, 1, Pol::Phi), a2p = l.slot(tag, 1, Pol::Perp);
  const FockVector plus = create(create(state, a2p), a1);
  const FockVector minus = create(create(state, a2), a1p);
  return (plus - minus).scaled(gain).pruned();
}

FockVector opa_first_order(const StateVector& qubit, const OpaConfig& cfg) {
  cfg.validate();
  if (cfg.geometry != Geometry::TwoMode) {
    throw std::invalid_argument("opa_first_order: requires the two-mode geometry");
  }
  if (qubit.dim() != 2 || std::abs(qubit.norm_squared() - 1.0) > 1e-12) {
    throw std::invalid_argument("opa_first_order: input must be a normalized qubit");
  }
  const ModeLayout l{2, 1};
  // Seed photon alpha a_{1H}^dagger + beta a_{1V}^dagger in the lab basis.
  const FockVector vac = FockVector::vacuum(l, cfg.cutoff);
  const FockVector seed = create(vac, l.slot(0, 0, Pol::Phi)).scaled(qubit[0]) +
                          create(vac, l.slot(0, 0, Pol::Perp)).scaled(qubit[1]);

  // First-order evolution 1 + g (A - A^dagger); the lowering part vanishes on
  // an empty k2, so the three-photon sector is g A |seed>.
  const int a1 = l.slot(0, 0, Pol::Phi), a1p = l.slot(0, 0, Pol::Perp);
  const int a2 = l.slot(0, 1, Pol::Phi), a2p = l.slot(0, 1, Pol::Perp);
  const FockVector lowering =
      annihilate(annihilate(seed, a2p), a1) - annihilate(annihilate(seed, a2), a1p);
  const FockVector evolved =
      seed + first_order_emission(seed, cfg.gain) - lowering.scaled(cfg.gain);
  const FockVector amplified = evolved.sector(3);

  const CMatrix basis = substitution_for_basis(qubit, orthogonal(qubit));
  return change_polarization_basis(amplified, basis).normalized();
}

FockVector opa_first_order(const RealQubit& input, const OpaConfig& cfg) {
  return opa_first_order(input.ket(), cfg);
}

FockVector flip_waveplates(const FockVector& state) {
  require_layout(state, 2, "flip_waveplates");
  const ModeLayout& l = state.layout();
  FockVector out(l, state.cutoff());
  for (const auto& [occ, a] : state.terms()) {
    Occupation next = occ;
    for (int t = 0; t < l.tags; ++t) {
      std::swap(next[static_cast<std::size_t>(l.slot(t, 1, Pol::Phi))],
                next[static_cast<std::size_t>(l.slot(t, 1, Pol::Perp))]);
    }
    out.add(next, a);
  }
  return out;
}

FockVector beamsplitter(const FockVector& state, const ModeMap& map) {
  require_layout(state, 2, "beamsplitter");
  if (!map.is_unitary()) throw std::invalid_argument("beamsplitter: mode map is not unitary");
  return transform_modes(state, map.expand(state.layout()), state.layout());
}

PostSelection postselect(const FockVector& state, OutputPort port) {
  require_layout(state, 2, "postselect");
  const ModeLayout& l = state.layout();
  const double total = state.norm_squared();
  if (total == 0.0) throw std::domain_error("postselect: zero input state");
  const int keep = static_cast<int>(port);
  const ModeLayout single{1, l.tags};
  FockVector kept(single, state.cutoff());
  for (const auto& [occ, a] : state.terms()) {
    bool allOnPort = true;
    Occupation reduced(static_cast<std::size_t>(single.slots()), 0);
    for (int t = 0; t < l.tags && allOnPort; ++t) {
      for (int p = 0; p < 2; ++p) {
        const auto pol = static_cast<Pol>(p);
        if (occ[static_cast<std::size_t>(l.slot(t, 1 - keep, pol))] != 0) {
          allOnPort = false;
          break;
        }
        reduced[static_cast<std::size_t>(single.slot(t, 0, pol))] =
            occ[static_cast<std::size_t>(l.slot(t, keep, pol))];
      }
    }
    if (allOnPort) kept.add(reduced, a);
  }
  PostSelection result;
  result.probability = kept.norm_squared() / total;
  if (result.probability > 0.0) result.state = kept.normalized();
  return result;
}

std::map<std::pair<int, int>, double> polarization_pattern(const FockVector& state) {
  require_layout(state, 1, "polarization_pattern");
  const ModeLayout& l = state.layout();
  std::map<std::pair<int, int>, double> out;
  for (const auto& [occ, a] : state.terms()) {
    int m = 0, n = 0;
    for (int t = 0; t < l.tags; ++t) {
      m += occ[static_cast<std::size_t>(l.slot(t, 0, Pol::Phi))];
      n += occ[static_cast<std::size_t>(l.slot(t, 0, Pol::Perp))];
    }
    out[{m, n}] += std::norm(a);
  }
  return out;
}

double fock_clone_fidelity(const FockVector& state) {
  require_layout(state, 1, "fock_clone_fidelity");
  double weighted = 0.0, total = 0.0;
  for (const auto& [pattern, p] : polarization_pattern(state)) {
    const int photons = pattern.first + pattern.second;
    if (photons == 0) throw std::domain_error("fock_clone_fidelity: term with zero photons");
    weighted += p * static_cast<double>(pattern.first) / photons;
    total += p;
  }
  if (total == 0.0) throw std::domain_error("fock_clone_fidelity: empty state");
  return weighted / total;
}

FockVector collinear_first_order(double psi, const OpaConfig& cfg) {
  cfg.validate();
  if (cfg.geometry != Geometry::Collinear) {
    throw std::invalid_argument("collinear_first_order: requires the collinear geometry");
  }
  const ModeLayout l{1, 1};
  const int h = l.slot(0, 0, Pol::Phi), v = l.slot(0, 0, Pol::Perp);
  const Complex e = std::polar(1.0, psi);
  const double r = std::numbers::sqrt2 / 2;

  const FockVector vac = FockVector::vacuum(l, cfg.cutoff);
  const FockVector seed = create(vac, h).scaled(r) + create(vac, v).scaled(r * e);
  // 1 + g (a_H^dagger a_V^dagger - a_H a_V), three-photon sector.
  const FockVector evolved = seed + create(create(seed, v), h).scaled(cfg.gain) -
                             annihilate(annihilate(seed, v), h).scaled(cfg.gain);
  const FockVector amplified = evolved.sector(3);

  const StateVector psiKet{Complex(r), r * e};
  const StateVector psiPerp{-r * std::conj(e), Complex(r)};
  FockVector rotated =
      change_polarization_basis(amplified, substitution_for_basis(psiKet, psiPerp)).normalized();

  const Complex lead = rotated.amplitude(rotated.occupation({{0, 0, 0, 3}}));
  if (std::abs(lead) > 0.0) rotated = rotated.scaled(std::abs(lead) / lead);
  return rotated;
}

TruncatedFockSpace::TruncatedFockSpace(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
  if (modes < 1 || cutoff < 0) throw std::invalid_argument("TruncatedFockSpace: bad size");
  Occupation occ(static_cast<std::size_t>(modes), 0);
  // Odometer over all occupations with total <= cutoff.
  while (true) {
    lookup_.emplace(occ, basis_.size());
    basis_.push_back(occ);
    int k = modes - 1;
    while (k >= 0) {
      ++occ[static_cast<std::size_t>(k)];
      if (total_photons(occ) <= cutoff) break;
      occ[static_cast<std::size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
}

std::size_t TruncatedFockSpace::index(const Occupation& occ) const {
  const auto it = lookup_.find(occ);
  if (it == lookup_.end()) throw std::out_of_range("TruncatedFockSpace: occupation not in basis");
  return it->second;
}

CMatrix TruncatedFockSpace::creation(int mode) const {
  if (mode < 0 || mode >= modes_) throw std::out_of_range("TruncatedFockSpace: bad mode");
  const auto n = static_cast<Eigen::Index>(dim());
  CMatrix m = CMatrix::Zero(n, n);
  for (std::size_t col = 0; col < basis_.size(); ++col) {
    Occupation next = basis_[col];
    const int k = next[static_cast<std::size_t>(mode)];
    ++next[static_cast<std::size_t>(mode)];
    if (total_photons(next) > cutoff_) continue;
    m(static_cast<Eigen::Index>(index(next)), static_cast<Eigen::Index>(col)) =
        std::sqrt(static_cast<double>(k + 1));
  }
  return m;
}

double hamiltonian_invariance_check(double psi, int cutoff) {
  if (cutoff < 2) throw std::invalid_argument("hamiltonian_invariance_check: cutoff must be >= 2");
  const TruncatedFockSpace space(2, cutoff);
  const CMatrix aH = space.creation(0);
  const CMatrix aV = space.creation(1);
  const Complex i{0.0, 1.0};
  const Complex e = std::polar(1.0, psi);
  const double r = std::numbers::sqrt2 / 2;

  const CMatrix aPsi = r * (aH + e * aV);
  const CMatrix aPsiPerp = r * (-std::conj(e) * aH + aV);

  const CMatrix lab = i * aH * aV;
  const CMatrix rotated =
      0.5 * i * std::conj(e) * (aPsi * aPsi - e * e * aPsiPerp * aPsiPerp);
  return max_abs_diff(lab + lab.adjoint(), rotated + rotated.adjoint());
}

TwoModePipeline run_two_mode_pipeline(const StateVector& qubit, const OpaConfig& cfg) {
  FockVector amplified = opa_first_order(qubit, cfg);
  FockVector flipped = flip_waveplates(amplified);
  FockVector split = beamsplitter(flipped);
  PostSelection selected = postselect_k3(split);
  return {std::move(amplified), std::move(flipped), std::move(split), std::move(selected)};
}

CrosscheckReport qubit_fock_crosscheck(const RealQubit& input, Geometry geometry, double psi) {
  CrosscheckReport r;
  FockVector single;
  if (geometry == Geometry::TwoMode) {
    const auto pipeline = run_two_mode_pipeline(input.ket());
    if (!pipeline.selected.state) {
      r.message = "post-selection on k3 has zero probability";
      return r;
    }
    single = *pipeline.selected.state;
    r.branchProbability = pipeline.selected.probability;
  } else {
    OpaConfig cfg;
    cfg.geometry = Geometry::Collinear;
    cfg.collinearPhase = psi;
    single = collinear_first_order(psi, cfg);
    r.branchProbability = 1.0;
  }
  const auto pattern = polarization_pattern(single);
  const auto at = [&](int m, int n) {
    const auto it = pattern.find({m, n});
    return it == pattern.end() ? 0.0 : it->second;
  };
  r.fockProbabilities = {at(3, 0), at(1, 2)};
  r.fockFidelity = fock_clone_fidelity(single);

  const Complex a30 = single.amplitude(single.occupation({{0, 0, 0, 3}}));
  const Complex a12 = single.amplitude(single.occupation({{0, 0, 0, 1}, {0, 0, 1, 2}}));
  if (std::abs(a30) > 0.0 && std::abs(a12) > 0.0) {
    r.derivedRelativeSign = (a12 / a30).real() >= 0.0 ? 1 : -1;
  }
  r.matchesPrintedSign = r.derivedRelativeSign == 1;

  // Qubit side in the {phi, phi_perp} basis.
  const auto triple = pqcm_1to3(input);
  const StateVector p = input.ket();
  const StateVector q = orthogonal(p);
  const auto amp = [&](const StateVector& a, const StateVector& b, const StateVector& c) {
    return std::norm(tensor(tensor(a, b), c).inner(triple.state));
  };
  r.qubitProbabilities = {amp(p, p, p), amp(p, q, q) + amp(q, p, q) + amp(q, q, p)};
  r.qubitFidelity = triple.perQubitFidelity[0];

  constexpr double tol = 1e-10;
  r.pass = std::abs(r.fockProbabilities[0] - r.qubitProbabilities[0]) < tol &&
           std::abs(r.fockProbabilities[1] - r.qubitProbabilities[1]) < tol &&
           std::abs(r.fockFidelity - r.qubitFidelity) < tol;
  std::ostringstream msg;
  msg.precision(15);
  msg << (r.pass ? "match" : "MISMATCH") << ": fock=(" << r.fockProbabilities[0] << ", "
      << r.fockProbabilities[1] << ") qubit=(" << r.qubitProbabilities[0] << ", "
      << r.qubitProbabilities[1] << ") fidelity fock=" << r.fockFidelity
      << " qubit=" << r.qubitFidelity;
  r.message = msg.str();
  return r;
}

}  // namespace pqcm::fock
