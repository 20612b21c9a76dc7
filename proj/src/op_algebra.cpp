// Copyright 2026 The dissip Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dissip/op_algebra.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cstdlib>

#include "dissip/errors.hpp"

namespace dissip {
namespace {

constexpr int kDefaultDenseLimit = 12;
std::atomic<int> g_dense_limit_override{-1};

std::size_t word_count(int n) { return static_cast<std::size_t>((n + 63) / 64); }

bool get_bit(const std::vector<std::uint64_t>& words, int i) {
  return ((words[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1U) != 0U;
}

void put_bit(std::vector<std::uint64_t>& words, int i, bool v) {
  const std::uint64_t mask = std::uint64_t{1} << (i % 64);
  auto& w = words[static_cast<std::size_t>(i) / 64];
  w = v ? (w | mask) : (w & ~mask);
}

void check_index(int i, int n, std::string_view what) {
  if (i < 0 || i >= n) {
    throw DimensionError(std::string(what) + " index " + std::to_string(i) + " out of range [0, " +
                         std::to_string(n) + ")");
  }
}

// Splits "X1 Z3" style encodings into (letter, 1-based index) tokens.
template <typename Fn>
void for_each_token(std::string_view enc, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < enc.size()) {
    while (pos < enc.size() && enc[pos] == ' ') ++pos;
    if (pos >= enc.size()) break;
    const std::size_t end = std::min(enc.find(' ', pos), enc.size());
    const std::string_view tok = enc.substr(pos, end - pos);
    pos = end;
    if (tok == "I") continue;
    int index = 0;
    const auto [ptr, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), index);
    if (tok.size() < 2 || ec != std::errc{} || ptr != tok.data() + tok.size()) {
      throw ValidationError("malformed operator token '" + std::string(tok) + "'");
    }
    fn(tok[0], index);
  }
}

// Bit mask over the 2^q basis index; qubit i maps to bit q-1-i.
std::uint64_t basis_mask(std::span<const std::uint64_t> words, int q) {
  std::uint64_t mask = 0;
  for (int i = 0; i < q; ++i) {
    if (((words[static_cast<std::size_t>(i) / 64] >> (i % 64)) & 1U) != 0U) {
      mask |= std::uint64_t{1} << (q - 1 - i);
    }
  }
  return mask;
}

}  // namespace

int dense_qubit_limit() {
  const int override_value = g_dense_limit_override.load();
  if (override_value >= 0) return override_value;
  if (const char* env = std::getenv("DISSIP_DENSE_LIMIT")) {
    int v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return kDefaultDenseLimit;
}

void set_dense_qubit_limit(std::optional<int> limit) { g_dense_limit_override.store(limit.value_or(-1)); }

void check_dense_capacity(int qubits, std::string_view what) {
  const int limit = dense_qubit_limit();
  if (qubits > limit) {
    throw CapacityError(std::string(what) + " needs " + std::to_string(qubits) + " qubits",
                        "DISSIP_DENSE_LIMIT", static_cast<std::size_t>(limit));
  }
}

Complex Phase::value() const {
  switch (power & 3U) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

PauliString::PauliString(int num_qubits) : n_(num_qubits), x_(word_count(num_qubits)), z_(word_count(num_qubits)) {
  if (num_qubits < 0) throw ValidationError("negative qubit count");
}

PauliString PauliString::single(int num_qubits, int qubit, char letter) {
  PauliString p(num_qubits);
  p.set(qubit, letter);
  return p;
}

PauliString PauliString::parse(std::string_view encoding, int num_qubits) {
  PauliString p(num_qubits);
  for_each_token(encoding, [&](char letter, int index) {
    if (letter != 'X' && letter != 'Y' && letter != 'Z') {
      throw ValidationError(std::string("unknown Pauli letter '") + letter + "'");
    }
    if (index < 1 || index > num_qubits) {
      throw ValidationError("qubit " + std::to_string(index) + " outside 1.." + std::to_string(num_qubits));
    }
    if (p.letter(index - 1) != 'I') throw ValidationError("qubit " + std::to_string(index) + " repeated");
    p.set(index - 1, letter);
  });
  return p;
}

bool PauliString::x(int qubit) const {
  check_index(qubit, n_, "qubit");
  return get_bit(x_, qubit);
}

bool PauliString::z(int qubit) const {
  check_index(qubit, n_, "qubit");
  return get_bit(z_, qubit);
}

char PauliString::letter(int qubit) const {
  const bool xb = x(qubit);
  const bool zb = z(qubit);
  if (xb && zb) return 'Y';
  if (xb) return 'X';
  if (zb) return 'Z';
  return 'I';
}

void PauliString::set(int qubit, char letter) {
  check_index(qubit, n_, "qubit");
  switch (letter) {
    case 'I': put_bit(x_, qubit, false); put_bit(z_, qubit, false); break;
    case 'X': put_bit(x_, qubit, true); put_bit(z_, qubit, false); break;
    case 'Y': put_bit(x_, qubit, true); put_bit(z_, qubit, true); break;
    case 'Z': put_bit(x_, qubit, false); put_bit(z_, qubit, true); break;
    default: throw ValidationError(std::string("unknown Pauli letter '") + letter + "'");
  }
}

int PauliString::weight() const {
  int w = 0;
  for (std::size_t i = 0; i < x_.size(); ++i) w += std::popcount(x_[i] | z_[i]);
  return w;
}

std::vector<int> PauliString::support() const {
  std::vector<int> s;
  for (int i = 0; i < n_; ++i) {
    if (get_bit(x_, i) || get_bit(z_, i)) s.push_back(i);
  }
  return s;
}

std::string PauliString::encoding() const {
  std::string out;
  for (int i : support()) {
    if (!out.empty()) out += ' ';
    out += letter(i);
    out += std::to_string(i + 1);
  }
  return out;
}

PauliProduct pauli_mul(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw DimensionError("pauli_mul: qubit counts " + std::to_string(a.num_qubits()) + " and " +
                         std::to_string(b.num_qubits()) + " differ");
  }
  // With P(x,z) = i^{xz} X^x Z^z, the phase exponent per qubit is
  // x1 z1 + x2 z2 + 2 z1 x2 - x3 z3 (mod 4).
  PauliString r(a.num_qubits());
  long long power = 0;
  const auto ax = a.x_words(), az = a.z_words(), bx = b.x_words(), bz = b.z_words();
  for (int q = 0; q < a.num_qubits(); ++q) {
    const bool x1 = a.x(q), z1 = a.z(q), x2 = b.x(q), z2 = b.z(q);
    const bool x3 = x1 != x2, z3 = z1 != z2;
    r.set(q, x3 ? (z3 ? 'Y' : 'X') : (z3 ? 'Z' : 'I'));
  }
  for (std::size_t w = 0; w < ax.size(); ++w) {
    const std::uint64_t x3 = ax[w] ^ bx[w];
    const std::uint64_t z3 = az[w] ^ bz[w];
    power += std::popcount(ax[w] & az[w]) + std::popcount(bx[w] & bz[w]) + 2 * std::popcount(az[w] & bx[w]) -
             std::popcount(x3 & z3);
  }
  return {std::move(r), Phase{static_cast<std::uint8_t>(((power % 4) + 4) % 4)}};
}

int pauli_commutes(const PauliString& a, const PauliString& b) {
  if (a.num_qubits() != b.num_qubits()) {
    throw DimensionError("pauli_commutes: qubit counts " + std::to_string(a.num_qubits()) + " and " +
                         std::to_string(b.num_qubits()) + " differ");
  }
  int parity = 0;
  const auto ax = a.x_words(), az = a.z_words(), bx = b.x_words(), bz = b.z_words();
  for (std::size_t w = 0; w < ax.size(); ++w) parity += std::popcount((ax[w] & bz[w]) ^ (az[w] & bx[w]));
  return parity & 1;
}

MajoranaMonomial::MajoranaMonomial(int num_modes) : n_(num_modes), occ_(word_count(num_modes)) {
  if (num_modes < 0 || num_modes % 2 != 0) {
    throw ValidationError("Majorana mode count must be even and nonnegative, got " + std::to_string(num_modes));
  }
}

MajoranaMonomial MajoranaMonomial::single(int num_modes, int mode) {
  MajoranaMonomial m(num_modes);
  check_index(mode, num_modes, "mode");
  put_bit(m.occ_, mode, true);
  return m;
}

MajoranaMonomial MajoranaMonomial::from_modes(int num_modes, std::span<const int> modes) {
  MajoranaMonomial m(num_modes);
  for (int mode : modes) {
    check_index(mode, num_modes, "mode");
    if (get_bit(m.occ_, mode)) throw ValidationError("mode " + std::to_string(mode + 1) + " repeated");
    put_bit(m.occ_, mode, true);
  }
  return m;
}

MajoranaMonomial MajoranaMonomial::parse(std::string_view encoding, int num_modes) {
  std::vector<int> modes;
  for_each_token(encoding, [&](char letter, int index) {
    if (letter != 'M') throw ValidationError(std::string("expected Majorana token 'M<k>', got '") + letter + "'");
    if (index < 1 || index > num_modes) {
      throw ValidationError("mode " + std::to_string(index) + " outside 1.." + std::to_string(num_modes));
    }
    modes.push_back(index - 1);
  });
  return from_modes(num_modes, modes);
}

bool MajoranaMonomial::contains(int mode) const {
  check_index(mode, n_, "mode");
  return get_bit(occ_, mode);
}

int MajoranaMonomial::weight() const {
  int w = 0;
  for (auto word : occ_) w += std::popcount(word);
  return w;
}

std::vector<int> MajoranaMonomial::support() const {
  std::vector<int> s;
  for (int i = 0; i < n_; ++i) {
    if (get_bit(occ_, i)) s.push_back(i);
  }
  return s;
}

std::string MajoranaMonomial::encoding() const {
  std::string out;
  for (int i : support()) {
    if (!out.empty()) out += ' ';
    out += 'M';
    out += std::to_string(i + 1);
  }
  return out;
}

int majorana_commutes(const MajoranaMonomial& a, const MajoranaMonomial& b) {
  if (a.num_modes() != b.num_modes()) {
    throw DimensionError("majorana_commutes: mode counts " + std::to_string(a.num_modes()) + " and " +
                         std::to_string(b.num_modes()) + " differ");
  }
  int overlap = 0;
  const auto aw = a.words(), bw = b.words();
  for (std::size_t w = 0; w < aw.size(); ++w) overlap += std::popcount(aw[w] & bw[w]);
  return (a.weight() * b.weight() - overlap) & 1;
}

PauliProduct jordan_wigner(const MajoranaMonomial& m) {
  const int q = m.num_modes() / 2;
  PauliProduct acc{PauliString(q), Phase{}};
  for (int mode : m.support()) {
    PauliString chi(q);
    const int j = mode / 2;
    for (int i = 0; i < j; ++i) chi.set(i, 'Z');
    chi.set(j, mode % 2 == 0 ? 'X' : 'Y');
    auto prod = pauli_mul(acc.result, chi);
    acc.result = std::move(prod.result);
    acc.phase = acc.phase * prod.phase;
  }
  return acc;
}

void accumulate_pauli(DenseOperator& target, const PauliString& p, Complex coeff) {
  const int q = p.num_qubits();
  const Eigen::Index dim = Eigen::Index{1} << q;
  if (target.rows() != dim || target.cols() != dim) {
    throw DimensionError("accumulate_pauli: target is " + std::to_string(target.rows()) + "x" +
                         std::to_string(target.cols()) + ", expected " + std::to_string(dim));
  }
  const std::uint64_t xmask = basis_mask(p.x_words(), q);
  const std::uint64_t zmask = basis_mask(p.z_words(), q);
  // P|j> = i^{#Y} (-1)^{popcount(z & j)} |j ^ x>
  const Complex base = coeff * Phase{static_cast<std::uint8_t>(std::popcount(xmask & zmask) & 3)}.value();
  for (std::uint64_t j = 0; j < static_cast<std::uint64_t>(dim); ++j) {
    const double sign = (std::popcount(zmask & j) & 1) != 0 ? -1.0 : 1.0;
    target(static_cast<Eigen::Index>(j ^ xmask), static_cast<Eigen::Index>(j)) += sign * base;
  }
}

DenseOperator to_dense(const PauliString& p, Complex global_phase) {
  check_dense_capacity(p.num_qubits(), "to_dense(PauliString)");
  const Eigen::Index dim = Eigen::Index{1} << p.num_qubits();
  DenseOperator out = DenseOperator::Zero(dim, dim);
  accumulate_pauli(out, p, global_phase);
  return out;
}

DenseOperator to_dense(const MajoranaMonomial& m, Complex global_phase) {
  check_dense_capacity(m.num_modes() / 2, "to_dense(MajoranaMonomial)");
  const auto jw = jordan_wigner(m);
  return to_dense(jw.result, global_phase * jw.phase.value());
}

std::vector<int> support(const PauliString& p) { return p.support(); }
std::vector<int> support(const MajoranaMonomial& m) { return m.support(); }

bool is_hermitian(const DenseOperator& op, double tol) {
  if (op.rows() != op.cols()) return false;
  return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace dissip
