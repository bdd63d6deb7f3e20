#include "kaonsim/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kaonsim {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void check_finite(const std::vector<Complex>& amps) {
    for (const Complex& a : amps) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
            throw std::invalid_argument("MultiKaonState: non-finite amplitude");
        }
    }
}

}  // namespace

Mat2 Mat2::adjoint() const {
    return Mat2{std::conj(a00), std::conj(a10), std::conj(a01), std::conj(a11)};
}

Mat2 Mat2::inverse() const {
    Complex d = det();
    if (std::abs(d) < 1e-300) {
        throw std::domain_error("Mat2::inverse: singular matrix");
    }
    return Mat2{a11 / d, -a01 / d, -a10 / d, a00 / d};
}

Mat2 Mat2::operator*(const Mat2& o) const {
    return Mat2{a00 * o.a00 + a01 * o.a10, a00 * o.a01 + a01 * o.a11,
                a10 * o.a00 + a11 * o.a10, a10 * o.a01 + a11 * o.a11};
}

void Mat2::apply(Complex& x0, Complex& x1) const {
    Complex y0 = a00 * x0 + a01 * x1;
    Complex y1 = a10 * x0 + a11 * x1;
    x0 = y0;
    x1 = y1;
}

Mat4 mat4_identity() {
    Mat4 m{};
    for (int i = 0; i < 4; ++i) m[i][i] = Complex{1.0};
    return m;
}

PairQuantumNumbers quantum_numbers(PairBasis v) {
    switch (v) {
        case PairBasis::Phi1: return {+2, +1, 1};
        case PairBasis::Phi2: return {-2, +1, 1};
        case PairBasis::Phi3: return {0, +1, 1};
        case PairBasis::Phi4: return {0, -1, 0};
    }
    throw std::invalid_argument("quantum_numbers: bad basis tag");
}

double pair_basis_amp(PairBasis v, int s1, int s2) {
    switch (v) {
        case PairBasis::Phi1: return (s1 == 0 && s2 == 0) ? 1.0 : 0.0;
        case PairBasis::Phi2: return (s1 == 1 && s2 == 1) ? 1.0 : 0.0;
        case PairBasis::Phi3: return (s1 != s2) ? kInvSqrt2 : 0.0;
        case PairBasis::Phi4:
            if (s1 == 0 && s2 == 1) return kInvSqrt2;
            if (s1 == 1 && s2 == 0) return -kInvSqrt2;
            return 0.0;
    }
    throw std::invalid_argument("pair_basis_amp: bad basis tag");
}

const char* pair_basis_name(PairBasis v) {
    switch (v) {
        case PairBasis::Phi1: return "phi1";
        case PairBasis::Phi2: return "phi2";
        case PairBasis::Phi3: return "phi3";
        case PairBasis::Phi4: return "phi4";
    }
    return "?";
}

MultiKaonState::MultiKaonState(std::vector<char> labels, std::vector<Complex> amps)
    : labels_(std::move(labels)), amps_(std::move(amps)) {
    if (labels_.empty() || labels_.size() > kMaxKaons) {
        throw std::invalid_argument("MultiKaonState: need 1.." +
                                    std::to_string(kMaxKaons) + " kaons");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        for (std::size_t j = i + 1; j < labels_.size(); ++j) {
            if (labels_[i] == labels_[j]) {
                throw std::invalid_argument(std::string("MultiKaonState: duplicate label '") +
                                            labels_[i] + "'");
            }
        }
    }
    if (amps_.size() != (std::size_t{1} << labels_.size())) {
        throw std::invalid_argument("MultiKaonState: amplitude count must be 2^n");
    }
    check_finite(amps_);
}

MultiKaonState MultiKaonState::basis_state(std::vector<char> labels, std::size_t index) {
    std::vector<Complex> amps(std::size_t{1} << labels.size(), Complex{0.0});
    amps.at(index) = Complex{1.0};
    return MultiKaonState(std::move(labels), std::move(amps));
}

std::size_t MultiKaonState::label_pos(char label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw std::invalid_argument(std::string("MultiKaonState: no kaon labeled '") +
                                    label + "'");
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

bool MultiKaonState::has_label(char label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

MultiKaonState tensor(const MultiKaonState& a, const MultiKaonState& b) {
    for (char l : b.labels()) {
        if (a.has_label(l)) {
            throw std::invalid_argument(std::string("tensor: label '") + l +
                                        "' present in both factors");
        }
    }
    std::vector<char> labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());

    const std::size_t na = a.num_kaons();
    std::vector<Complex> amps((std::size_t{1} << labels.size()), Complex{0.0});
    for (std::size_t ib = 0; ib < b.dim(); ++ib) {
        for (std::size_t ia = 0; ia < a.dim(); ++ia) {
            amps[ia | (ib << na)] = a.amp(ia) * b.amp(ib);
        }
    }
    return MultiKaonState(std::move(labels), std::move(amps));
}

double norm2(const MultiKaonState& s) {
    double n = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) n += std::norm(s.amp(i));
    return n;
}

Complex inner(const MultiKaonState& a, const MultiKaonState& b) {
    if (a.labels() != b.labels()) {
        throw std::invalid_argument("inner: label lists must match in order");
    }
    Complex acc{0.0};
    for (std::size_t i = 0; i < a.dim(); ++i) acc += std::conj(a.amp(i)) * b.amp(i);
    return acc;
}

MultiKaonState scale(const MultiKaonState& s, Complex z) {
    std::vector<Complex> amps(s.amps());
    for (Complex& a : amps) a *= z;
    return MultiKaonState(s.labels(), std::move(amps));
}

MultiKaonState normalized(const MultiKaonState& s) {
    double n = norm2(s);
    if (n < kZeroProjectionProb) {
        throw std::domain_error("normalized: state has (near-)zero norm");
    }
    return scale(s, Complex{1.0 / std::sqrt(n)});
}

MultiKaonState apply_single(const MultiKaonState& s, char label, const Mat2& m) {
    const std::size_t k = s.label_pos(label);
    const std::size_t bit = std::size_t{1} << k;
    std::vector<Complex> amps(s.amps());
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & bit) continue;
        Complex x0 = amps[i];
        Complex x1 = amps[i | bit];
        m.apply(x0, x1);
        amps[i] = x0;
        amps[i | bit] = x1;
    }
    return MultiKaonState(s.labels(), std::move(amps));
}

namespace {

// Splits an amplitude index into (pair index s1 + 2*s2, remaining-kaon index).
struct PairSplit {
    std::size_t bit1, bit2;          // masks of the two pair positions
    std::size_t n_rest;              // number of remaining kaons
    std::vector<std::size_t> rest_bits;  // masks of remaining positions, in label order

    PairSplit(const MultiKaonState& s, char l1, char l2) {
        if (l1 == l2) throw std::invalid_argument("pair: labels must differ");
        const std::size_t p1 = s.label_pos(l1);
        const std::size_t p2 = s.label_pos(l2);
        bit1 = std::size_t{1} << p1;
        bit2 = std::size_t{1} << p2;
        for (std::size_t k = 0; k < s.num_kaons(); ++k) {
            if (k != p1 && k != p2) rest_bits.push_back(std::size_t{1} << k);
        }
        n_rest = rest_bits.size();
    }

    std::size_t compose(std::size_t pair_idx, std::size_t rest_idx) const {
        std::size_t i = 0;
        if (pair_idx & 1) i |= bit1;
        if (pair_idx & 2) i |= bit2;
        for (std::size_t k = 0; k < n_rest; ++k) {
            if (rest_idx & (std::size_t{1} << k)) i |= rest_bits[k];
        }
        return i;
    }
};

std::vector<char> remaining_labels(const MultiKaonState& s, char l1, char l2) {
    std::vector<char> out;
    for (char l : s.labels()) {
        if (l != l1 && l != l2) out.push_back(l);
    }
    return out;
}

}  // namespace

MultiKaonState apply_pair(const MultiKaonState& s, char l1, char l2, const Mat4& m) {
    PairSplit split(s, l1, l2);
    std::vector<Complex> amps(s.dim(), Complex{0.0});
    const std::size_t rest_dim = std::size_t{1} << split.n_rest;
    for (std::size_t r = 0; r < rest_dim; ++r) {
        std::array<Complex, 4> in{};
        for (std::size_t pi = 0; pi < 4; ++pi) in[pi] = s.amp(split.compose(pi, r));
        for (std::size_t i = 0; i < 4; ++i) {
            Complex acc{0.0};
            for (std::size_t j = 0; j < 4; ++j) acc += m[i][j] * in[j];
            amps[split.compose(i, r)] = acc;
        }
    }
    return MultiKaonState(s.labels(), std::move(amps));
}

PairProjection project_pair(const MultiKaonState& s, char l1, char l2, PairBasis v) {
    if (s.num_kaons() < 3) {
        throw std::invalid_argument("project_pair: need at least one remaining kaon");
    }
    PairSplit split(s, l1, l2);
    const std::size_t rest_dim = std::size_t{1} << split.n_rest;

    std::vector<Complex> overlap(rest_dim, Complex{0.0});
    double prob = 0.0;
    for (std::size_t r = 0; r < rest_dim; ++r) {
        Complex acc{0.0};
        for (int s2 = 0; s2 < 2; ++s2) {
            for (int s1 = 0; s1 < 2; ++s1) {
                const double v_amp = pair_basis_amp(v, s1, s2);
                if (v_amp == 0.0) continue;
                acc += v_amp * s.amp(split.compose(static_cast<std::size_t>(s1 + 2 * s2), r));
            }
        }
        overlap[r] = acc;
        prob += std::norm(acc);
    }

    PairProjection out;
    out.prob = prob;
    if (prob >= kZeroProjectionProb) {
        const double inv = 1.0 / std::sqrt(prob);
        for (Complex& a : overlap) a *= inv;
        out.post = MultiKaonState(remaining_labels(s, l1, l2), std::move(overlap));
    }
    return out;
}

double phase_overlap(const MultiKaonState& a, const MultiKaonState& b) {
    const double na = norm2(a);
    const double nb = norm2(b);
    if (na < kZeroProjectionProb || nb < kZeroProjectionProb) {
        throw std::domain_error("phase_overlap: zero-norm argument");
    }
    return std::norm(inner(a, b)) / (na * nb);
}

double phase_aligned_residual(const MultiKaonState& a, const MultiKaonState& b) {
    Complex ov = inner(a, b);
    Complex phase =
        (std::abs(ov) < 1e-300) ? Complex{1.0} : ov / std::abs(ov);
    double res = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        res = std::max(res, std::abs(a.amp(i) * phase - b.amp(i)));
    }
    return res;
}

}  // namespace kaonsim
