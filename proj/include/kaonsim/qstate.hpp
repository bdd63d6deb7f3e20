// qstate.hpp
// Dense complex state vectors over small sets of labeled kaons, in the
// product strangeness basis (bit k of an amplitude index = strangeness of
// particle k, 0 = K0, 1 = K0bar). Capped at 4 kaons / 16 amplitudes.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace kaonsim {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxKaons = 4;

// Probability below which a projection is reported as a zero branch
// instead of producing a normalized post-state.
inline constexpr double kZeroProjectionProb = 1e-30;

// 2x2 complex matrix, row-major.
struct Mat2 {
    Complex a00{1.0}, a01{0.0}, a10{0.0}, a11{1.0};

    static Mat2 identity() { return Mat2{}; }

    Complex det() const { return a00 * a11 - a01 * a10; }
    Mat2 adjoint() const;
    Mat2 inverse() const;  // throws std::domain_error on singular input
    Mat2 operator*(const Mat2& o) const;
    void apply(Complex& x0, Complex& x1) const;
};

// 4x4 complex matrix acting on an ordered kaon pair; m[i][j] with
// i, j = s1 + 2*s2 (first pair member = low bit).
using Mat4 = std::array<std::array<Complex, 4>, 4>;

Mat4 mat4_identity();

// The four two-kaon collision-projection basis states: |K0 K0>,
// |K0bar K0bar>, (|K0 K0bar> + |K0bar K0>)/sqrt2, (|K0 K0bar> - |K0bar K0>)/sqrt2.
// Simultaneous eigenstates of strangeness, parity and isospin.
enum class PairBasis : int { Phi1 = 0, Phi2 = 1, Phi3 = 2, Phi4 = 3 };

inline constexpr std::array<PairBasis, 4> kAllPairBases = {
    PairBasis::Phi1, PairBasis::Phi2, PairBasis::Phi3, PairBasis::Phi4};

struct PairQuantumNumbers {
    int strangeness;  // total S
    int parity;       // orbital exchange parity, +1 or -1
    int isospin;      // total I
};

PairQuantumNumbers quantum_numbers(PairBasis v);

// Amplitude of |s1 s2> within basis vector v (s = 0 for K0, 1 for K0bar).
double pair_basis_amp(PairBasis v, int s1, int s2);

const char* pair_basis_name(PairBasis v);  // "phi1".."phi4"

// Immutable state vector over n labeled kaons. Amplitude index bit k is
// the strangeness of labels()[k]; tensor products put the left factor in
// the low bits.
class MultiKaonState {
  public:
    MultiKaonState(std::vector<char> labels, std::vector<Complex> amps);

    static MultiKaonState basis_state(std::vector<char> labels, std::size_t index);

    const std::vector<char>& labels() const { return labels_; }
    std::size_t num_kaons() const { return labels_.size(); }
    std::size_t dim() const { return amps_.size(); }
    const Complex& amp(std::size_t i) const { return amps_[i]; }
    const std::vector<Complex>& amps() const { return amps_; }

    // Position of a label in the ordered label list; throws if absent.
    std::size_t label_pos(char label) const;
    bool has_label(char label) const;

  private:
    std::vector<char> labels_;
    std::vector<Complex> amps_;
};

// Product state a (x) b; labels must be disjoint.
MultiKaonState tensor(const MultiKaonState& a, const MultiKaonState& b);

double norm2(const MultiKaonState& s);

// <a|b>; conjugates the left argument. Labels must match exactly.
Complex inner(const MultiKaonState& a, const MultiKaonState& b);

MultiKaonState scale(const MultiKaonState& s, Complex z);
MultiKaonState normalized(const MultiKaonState& s);  // throws on ~zero norm

// Apply a one-kaon operator to the named kaon.
MultiKaonState apply_single(const MultiKaonState& s, char label, const Mat2& m);

// Apply a two-kaon operator to the named ordered pair.
MultiKaonState apply_pair(const MultiKaonState& s, char l1, char l2, const Mat4& m);

struct PairProjection {
    double prob = 0.0;
    // Normalized state of the remaining kaons (original label order minus
    // the pair); empty when prob < kZeroProjectionProb.
    std::optional<MultiKaonState> post;
};

// Project the ordered pair (l1, l2) onto basis vector v. prob is the
// squared overlap including decay losses; the post-state is renormalized.
PairProjection project_pair(const MultiKaonState& s, char l1, char l2, PairBasis v);

// |<a|b>|^2 / (norm2(a) * norm2(b)); equals 1 iff a == b up to global phase.
double phase_overlap(const MultiKaonState& a, const MultiKaonState& b);

// Max component difference after aligning b's global phase to a.
double phase_aligned_residual(const MultiKaonState& a, const MultiKaonState& b);

}  // namespace kaonsim
