#pragma once

// Angular-momentum plumbing: Lande g-factors and Clebsch-Gordan
// coefficients in the Condon-Shortley sign convention. Half-integer
// arguments are accepted as doubles and validated; internally everything
// is carried as twice the quantum number so arithmetic stays integral.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace biphoton {

namespace detail {

inline bool is_half_integer(double x) {
    const double t = 2.0 * x;
    return std::abs(t - std::round(t)) < 1e-9;
}

inline int twice(double x) {
    if (!is_half_integer(x))
        throw std::domain_error("angular: expected integer or half-integer");
    return static_cast<int>(std::llround(2.0 * x));
}

// factorial(n) as double; n is small here (j <= 5/2 plus margin).
inline double factorial(int n) {
    static const auto table = [] {
        std::array<double, 40> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    if (n < 0 || n >= static_cast<int>(table.size()))
        throw std::domain_error("angular: factorial argument out of range");
    return table[static_cast<std::size_t>(n)];
}

} // namespace detail

// Lande g-factor for LS coupling. Arguments are the orbital, spin and
// total angular momentum quantum numbers.
inline double lande_g(int l, double s, double j) {
    const int ts = detail::twice(s);
    const int tj = detail::twice(j);
    if (l < 0 || ts < 0 || tj < 0 || tj < std::abs(2 * l - ts) || tj > 2 * l + ts)
        throw std::domain_error("lande_g: invalid (l, s, j) triple");
    const double jj = j * (j + 1.0);
    const double ss = s * (s + 1.0);
    const double ll = static_cast<double>(l) * (l + 1.0);
    return 1.0 + (jj + ss - ll) / (2.0 * jj);
}

// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, Racah's closed form.
// Out-of-range or selection-rule-violating inputs return 0.
inline double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
    using detail::factorial;
    const int tj1 = detail::twice(j1), tm1 = detail::twice(m1);
    const int tj2 = detail::twice(j2), tm2 = detail::twice(m2);
    const int tJ = detail::twice(J), tM = detail::twice(M);

    if (tm1 + tm2 != tM) return 0.0;
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ) return 0.0;
    if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2) return 0.0;
    // (j1 + m1) etc. must be integers: parities have to match.
    if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tJ + tM) % 2 != 0) return 0.0;
    if ((tj1 + tj2 + tJ) % 2 != 0) return 0.0;

    // All of these are guaranteed integral now (stored doubled).
    const int a1 = (tj1 + tj2 - tJ) / 2;
    const int a2 = (tj1 - tj2 + tJ) / 2;
    const int a3 = (-tj1 + tj2 + tJ) / 2;
    const int a4 = (tj1 + tj2 + tJ) / 2 + 1;
    if (a1 < 0 || a2 < 0 || a3 < 0) return 0.0;

    const int j1pm1 = (tj1 + tm1) / 2, j1mm1 = (tj1 - tm1) / 2;
    const int j2pm2 = (tj2 + tm2) / 2, j2mm2 = (tj2 - tm2) / 2;
    const int JpM = (tJ + tM) / 2, JmM = (tJ - tM) / 2;

    const double prefactor = std::sqrt(
        (tJ + 1.0) * factorial(a1) * factorial(a2) * factorial(a3) / factorial(a4) *
        factorial(j1pm1) * factorial(j1mm1) * factorial(j2pm2) * factorial(j2mm2) *
        factorial(JpM) * factorial(JmM));

    const int kmin = std::max({0, (tj2 - tJ - tm1) / 2, (tj1 - tJ + tm2) / 2});
    const int kmax = std::min({a1, j1mm1, j2pm2});
    double sum = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const double denom = factorial(k) * factorial(a1 - k) * factorial(j1mm1 - k) *
                             factorial(j2pm2 - k) * factorial((tJ - tj2 + tm1) / 2 + k) *
                             factorial((tJ - tj1 - tm2) / 2 + k);
        sum += ((k % 2 == 0) ? 1.0 : -1.0) / denom;
    }
    return prefactor * sum;
}

} // namespace biphoton
