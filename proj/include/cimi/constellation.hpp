#pragma once

#include <complex>
#include <numeric>
#include <utility>
#include <vector>

namespace cimi {

using cplx = std::complex<double>;

// Exact fraction, used where a quality figure must be reported exactly.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    Rational operator+(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Finite set of real coordinate values with marginal probabilities.
struct CoordinateAlphabet {
    std::vector<double> values; // strictly increasing
    std::vector<double> probs;

    std::size_t size() const { return values.size(); }
};

// Complex signal set with a probability table and an optional bit labeling.
// Bit j of a label means (label >> j) & 1; labels are present only when the
// point count is a power of two and a labeling rule applies.
struct Constellation {
    std::vector<cplx> points;
    std::vector<double> probs;
    std::vector<unsigned> labels; // empty when unlabeled
    int label_bits = 0;

    std::size_t size() const { return points.size(); }
    bool has_labels() const { return !labels.empty(); }
    double average_energy() const {
        double e = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i)
            e += probs[i] * std::norm(points[i]);
        return e;
    }
};

// Square QAM for order 4/16/64 and the cross shape for 32, unit average
// energy, uniform probabilities. Square QAM carries a per-axis Gray labeling;
// the cross carries a fixed quasi-Gray labeling (see gray_penalty).
Constellation make_qam(int order);

// Unit-circle PSK. Even orders >= 4 are offset by pi/order so that 4PSK and
// 4QAM coincide; order 2 is the real pair {+1, -1}. Gray labeling is attached
// when the order is a power of two.
Constellation make_psk(int order);

// Every point multiplied by exp(i*phi); probabilities and labeling carry over.
Constellation rotate(const Constellation& c, double phi);

// Marginal alphabets of the real parts (first) and imaginary parts (second).
std::pair<CoordinateAlphabet, CoordinateAlphabet>
coordinate_alphabets(const Constellation& c);

// Union of the two coordinate alphabets; each value's probability is the
// average of its in-phase and quadrature marginals, i.e. the distribution of
// a coordinate whose role (real or imaginary) is uniformly random.
CoordinateAlphabet union_alphabet(const CoordinateAlphabet& qi,
                                  const CoordinateAlphabet& qq);

// Effective per-antenna constellation after coordinate interleaving: the
// Cartesian product of the union alphabet with itself, coordinates modeled
// as independent. Inherits the base scale (no re-normalization). The base
// labeling carries over only when the point list is unchanged.
Constellation ci_enhanced(const Constellation& c);

// True when coordinate interleaving does not enlarge the point set.
bool is_ci_invariant(const Constellation& c);

// Shannon entropy of a probability table, in bits.
double entropy_bits(const std::vector<double>& probs);

// Indices of points whose label has bit_value at bit_position.
std::vector<int> label_subset(const Constellation& c, int bit_position,
                              int bit_value);

// Indices of points of an enhanced constellation whose selected coordinate
// equals value; position 0 selects the imaginary (quadrature) coordinate,
// position 1 the real (in-phase) one.
std::vector<int> coordinate_subset(const Constellation& m, int position,
                                   double value);

// Label quality of a constellation: the mean, over points, of the average
// label Hamming distance to that point's nearest-neighbor points. A pure
// Gray labeling scores exactly 1.
Rational gray_penalty(const Constellation& c);

} // namespace cimi
