#include "cimi/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cimi {

namespace {

constexpr double kValueTol = 1e-9; // coordinate dedup / matching tolerance

double snap_zero(double v) { return std::fabs(v) < 1e-15 ? 0.0 : v; }

unsigned gray(unsigned i) { return i ^ (i >> 1); }

int ilog2(int n) {
    int b = 0;
    while ((1 << b) < n)
        ++b;
    return b;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Quasi-Gray map for the 32-point cross, keyed by grid coordinates in units
// of the odd-integer lattice. Vertical steps and inner horizontal steps all
// flip a single bit; only the eight seams into the outermost columns flip
// two. Averaged per point over nearest neighbors, the label Hamming distance
// comes out at exactly 7/6 (asserted by a unit test).
struct Cross32Label {
    int x, y;
    unsigned label;
};
constexpr Cross32Label kCross32[] = {
    {-5, -3, 0b10010}, {-5, -1, 0b00010}, {-5, 1, 0b00110}, {-5, 3, 0b10110},
    {-3, -5, 0b00100}, {-3, -3, 0b00000}, {-3, -1, 0b01000}, {-3, 1, 0b01010},
    {-3, 3, 0b01110},  {-3, 5, 0b01100},  {-1, -5, 0b10100}, {-1, -3, 0b10000},
    {-1, -1, 0b11000}, {-1, 1, 0b11010},  {-1, 3, 0b11110},  {-1, 5, 0b11100},
    {1, -5, 0b10101},  {1, -3, 0b10001},  {1, -1, 0b11001},  {1, 1, 0b11011},
    {1, 3, 0b11111},   {1, 5, 0b11101},   {3, -5, 0b00101},  {3, -3, 0b00001},
    {3, -1, 0b01001},  {3, 1, 0b01011},   {3, 3, 0b01111},   {3, 5, 0b01101},
    {5, -3, 0b10011},  {5, -1, 0b00011},  {5, 1, 0b00111},   {5, 3, 0b10111},
};

Constellation square_qam(int side) {
    const int bits_per_axis = ilog2(side);
    double energy = 0.0;
    std::vector<int> levels(side);
    for (int i = 0; i < side; ++i) {
        levels[i] = 2 * i - (side - 1);
        energy += levels[i] * levels[i];
    }
    energy = 2.0 * energy / side; // per-axis mean times two axes
    const double scale = 1.0 / std::sqrt(energy);

    Constellation c;
    const int n = side * side;
    c.points.reserve(n);
    c.labels.reserve(n);
    c.probs.assign(n, 1.0 / n);
    c.label_bits = 2 * bits_per_axis;
    for (int ix = 0; ix < side; ++ix)
        for (int iy = 0; iy < side; ++iy) {
            c.points.push_back({levels[ix] * scale, levels[iy] * scale});
            c.labels.push_back((gray(ix) << bits_per_axis) | gray(iy));
        }
    return c;
}

Constellation cross_qam32() {
    // mean energy of the cross grid is 20 in lattice units
    const double scale = 1.0 / std::sqrt(20.0);
    Constellation c;
    c.probs.assign(32, 1.0 / 32.0);
    c.label_bits = 5;
    for (const auto& e : kCross32) {
        c.points.push_back({e.x * scale, e.y * scale});
        c.labels.push_back(e.label);
    }
    return c;
}

// Merge a sorted (value, prob) list, coalescing values within tolerance.
CoordinateAlphabet coalesce(std::vector<std::pair<double, double>> vp) {
    std::sort(vp.begin(), vp.end());
    CoordinateAlphabet a;
    for (const auto& [v, p] : vp) {
        if (!a.values.empty() && v - a.values.back() < kValueTol)
            a.probs.back() += p;
        else {
            a.values.push_back(v);
            a.probs.push_back(p);
        }
    }
    return a;
}

bool same_point(const cplx& a, const cplx& b) {
    return std::fabs(a.real() - b.real()) < kValueTol &&
           std::fabs(a.imag() - b.imag()) < kValueTol;
}

bool same_point_set(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size())
        return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& p : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && same_point(p, b[j])) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found)
            return false;
    }
    return true;
}

} // namespace

Rational::Rational(long long n, long long d) {
    if (d == 0)
        throw std::invalid_argument("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    num = g ? n / g : n;
    den = g ? d / g : d;
}

Rational Rational::operator+(const Rational& o) const {
    return {num * o.den + o.num * den, den * o.den};
}

Constellation make_qam(int order) {
    switch (order) {
    case 4:
        return square_qam(2);
    case 16:
        return square_qam(4);
    case 32:
        return cross_qam32();
    case 64:
        return square_qam(8);
    default:
        throw std::invalid_argument("unsupported constellation order");
    }
}

Constellation make_psk(int order) {
    if (order < 2)
        throw std::invalid_argument("unsupported constellation order");
    const double offset = (order >= 4 && order % 2 == 0) ? M_PI / order : 0.0;
    Constellation c;
    c.probs.assign(order, 1.0 / order);
    for (int k = 0; k < order; ++k) {
        const double phase = 2.0 * M_PI * k / order + offset;
        c.points.push_back({snap_zero(std::cos(phase)), snap_zero(std::sin(phase))});
    }
    if (is_pow2(order)) {
        c.label_bits = ilog2(order);
        for (int k = 0; k < order; ++k)
            c.labels.push_back(gray(static_cast<unsigned>(k)));
    }
    return c;
}

Constellation rotate(const Constellation& c, double phi) {
    Constellation r = c;
    const cplx w = std::polar(1.0, phi);
    for (auto& p : r.points)
        p *= w;
    return r;
}

std::pair<CoordinateAlphabet, CoordinateAlphabet>
coordinate_alphabets(const Constellation& c) {
    std::vector<std::pair<double, double>> re, im;
    for (std::size_t i = 0; i < c.size(); ++i) {
        re.emplace_back(c.points[i].real(), c.probs[i]);
        im.emplace_back(c.points[i].imag(), c.probs[i]);
    }
    return {coalesce(std::move(re)), coalesce(std::move(im))};
}

CoordinateAlphabet union_alphabet(const CoordinateAlphabet& qi,
                                  const CoordinateAlphabet& qq) {
    std::vector<std::pair<double, double>> vp;
    for (std::size_t i = 0; i < qi.size(); ++i)
        vp.emplace_back(qi.values[i], 0.5 * qi.probs[i]);
    for (std::size_t i = 0; i < qq.size(); ++i)
        vp.emplace_back(qq.values[i], 0.5 * qq.probs[i]);
    return coalesce(std::move(vp));
}

Constellation ci_enhanced(const Constellation& c) {
    const auto [qi, qq] = coordinate_alphabets(c);
    const CoordinateAlphabet u = union_alphabet(qi, qq);
    Constellation m;
    for (std::size_t ir = 0; ir < u.size(); ++ir)
        for (std::size_t ii = 0; ii < u.size(); ++ii) {
            m.points.push_back({u.values[ir], u.values[ii]});
            m.probs.push_back(u.probs[ir] * u.probs[ii]);
        }
    if (c.has_labels() && m.size() == c.size()) {
        bool same_order = true;
        for (std::size_t i = 0; i < m.size(); ++i)
            if (!same_point(m.points[i], c.points[i])) {
                same_order = false;
                break;
            }
        if (same_order) {
            m.labels = c.labels;
            m.label_bits = c.label_bits;
        }
    }
    return m;
}

bool is_ci_invariant(const Constellation& c) {
    return same_point_set(ci_enhanced(c).points, c.points);
}

double entropy_bits(const std::vector<double>& probs) {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0)
            h -= p * std::log2(p);
    return h;
}

std::vector<int> label_subset(const Constellation& c, int bit_position,
                              int bit_value) {
    if (!c.has_labels())
        throw std::invalid_argument("constellation has no labeling");
    if (bit_position < 0 || bit_position >= c.label_bits)
        throw std::invalid_argument("bit position out of range");
    std::vector<int> out;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (static_cast<int>((c.labels[i] >> bit_position) & 1u) == bit_value)
            out.push_back(static_cast<int>(i));
    return out;
}

std::vector<int> coordinate_subset(const Constellation& m, int position,
                                   double value) {
    if (position != 0 && position != 1)
        throw std::invalid_argument("position must be 0 or 1");
    std::vector<int> out;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double coord =
            position == 0 ? m.points[i].imag() : m.points[i].real();
        if (std::fabs(coord - value) < kValueTol)
            out.push_back(static_cast<int>(i));
    }
    if (out.empty())
        throw std::invalid_argument("value not in alphabet");
    return out;
}

Rational gray_penalty(const Constellation& c) {
    if (!c.has_labels())
        throw std::invalid_argument("constellation has no labeling");
    const std::size_t n = c.size();
    double d2min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d2min = std::min(d2min, std::norm(c.points[i] - c.points[j]));

    Rational sum(0, 1);
    for (std::size_t i = 0; i < n; ++i) {
        long long hamming = 0, neighbors = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            if (std::norm(c.points[i] - c.points[j]) < d2min + kValueTol) {
                ++neighbors;
                hamming += std::popcount(c.labels[i] ^ c.labels[j]);
            }
        }
        sum = sum + Rational(hamming, neighbors);
    }
    return {sum.num, sum.den * static_cast<long long>(n)};
}

} // namespace cimi
