#include "ptring/cubic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ptring::cubic
{

double Polynomial::term_scale(double x) const
{
    const double x2 = x * x;
    return std::max({std::abs(c3 * x2 * x), std::abs(c2 * x2), std::abs(c1 * x), std::abs(c0)});
}

double Polynomial::relative_residual(double x) const
{
    const double scale = term_scale(x);
    const double value = std::abs((*this)(x));
    return scale > 0.0 ? value / scale : value;
}

double root_scale(const Polynomial &p)
{
    if (p.c3 == 0.0)
        return 1.0;
    const double s = 2.0 * std::max({std::abs(p.c2 / p.c3), std::sqrt(std::abs(p.c1 / p.c3)),
                                     std::cbrt(std::abs(p.c0 / (2.0 * p.c3)))});
    return s > 0.0 ? s : 1.0;
}

Polynomial rescaled(const Polynomial &p, double s)
{
    Polynomial q{p.c3 * s * s * s, p.c2 * s * s, p.c1 * s, p.c0};
    const double norm = std::max({std::abs(q.c3), std::abs(q.c2), std::abs(q.c1), std::abs(q.c0)});
    if (norm > 0.0) {
        q.c3 /= norm;
        q.c2 /= norm;
        q.c1 /= norm;
        q.c0 /= norm;
    }
    return q;
}

namespace
{
struct DiscriminantTerms
{
    double value = 0.0;
    double magnitude = 0.0;
};

DiscriminantTerms discriminant_terms(const Polynomial &p)
{
    const double a = p.c3, b = p.c2, c = p.c1, d = p.c0;
    const double t1 = 18.0 * a * b * c * d;
    const double t2 = -4.0 * b * b * b * d;
    const double t3 = b * b * c * c;
    const double t4 = -4.0 * a * c * c * c;
    const double t5 = -27.0 * a * a * d * d;
    return {t1 + t2 + t3 + t4 + t5,
            std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4) + std::abs(t5)};
}
} // namespace

double discriminant(const Polynomial &p)
{
    return discriminant_terms(p).value;
}

DiscriminantSign discriminant_sign(const Polynomial &p, double rel_tol)
{
    const Polynomial q = rescaled(p, root_scale(p));
    const auto terms = discriminant_terms(q);
    if (std::abs(terms.value) <= rel_tol * terms.magnitude)
        return DiscriminantSign::Zero;
    return terms.value > 0.0 ? DiscriminantSign::Positive : DiscriminantSign::Negative;
}

namespace
{

double cardano_real_root(const Polynomial &p)
{
    const double s = root_scale(p);
    const Polynomial q = rescaled(p, s);
    const double a = q.c3, b = q.c2, c = q.c1, d = q.c0;

    const double d0 = b * b - 3.0 * a * c;
    const double d1 = 2.0 * b * b * b - 9.0 * a * b * c + 27.0 * a * a * d;
    double radicand = d1 * d1 - 4.0 * d0 * d0 * d0;
    // Rounding can flip the sign of a near-zero radicand that the scaled
    // discriminant already classified as negative.
    if (radicand < 0.0 && -radicand <= 1e-10 * std::max(d1 * d1, 4.0 * std::abs(d0 * d0 * d0)))
        radicand = 0.0;
    if (radicand < 0.0)
        throw std::domain_error("closed_form_real_root: discriminant is not negative");
    const double root_term = std::copysign(std::sqrt(radicand), d1 == 0.0 ? 1.0 : d1);
    const double x = std::cbrt(-4.0 * (d1 + root_term));
    if (x == 0.0)
        return s * (-b / (3.0 * a)); // triple root
    return s * (x * x - 2.0 * b * x + 4.0 * b * b - 12.0 * a * c) / (6.0 * a * x);
}

} // namespace

double closed_form_real_root(const Polynomial &p)
{
    if (p.c3 == 0.0)
        throw std::domain_error("closed_form_real_root: leading coefficient is zero");
    const double direct = cardano_real_root(p);
    if (p.c0 == 0.0)
        return direct;
    // The formula cancels when the real root is much smaller than the complex
    // pair. The reversed polynomial has root 1/x, which is then dominant.
    const double reversed = 1.0 / cardano_real_root({p.c0, p.c1, p.c2, p.c3});
    return p.relative_residual(reversed) < p.relative_residual(direct) ? reversed : direct;
}

double polish_root(const Polynomial &p, double x)
{
    double best = x;
    double best_res = std::abs(p(x));
    for (int iter = 0; iter < 60 && best_res > 0.0; ++iter) {
        const double dp = p.derivative(x);
        if (dp == 0.0 || !std::isfinite(dp))
            break;
        const double step = p(x) / dp;
        const double next = x - step;
        const double res = std::abs(p(next));
        if (!std::isfinite(res))
            break;
        if (res < best_res) {
            best = next;
            best_res = res;
        } else if (iter > 3) {
            break;
        }
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next))
            break;
        x = next;
    }
    return best;
}

std::vector<double> general_real_roots(const Polynomial &p)
{
    std::vector<double> roots;
    if (p.c3 == 0.0) {
        if (p.c2 == 0.0) {
            if (p.c1 == 0.0)
                return roots;
            roots.push_back(-p.c0 / p.c1);
            return roots;
        }
        // Quadratic, cancellation-free form.
        const double disc = p.c1 * p.c1 - 4.0 * p.c2 * p.c0;
        if (disc < 0.0)
            return roots;
        const double qv = -0.5 * (p.c1 + std::copysign(std::sqrt(disc), p.c1 == 0.0 ? 1.0 : p.c1));
        roots.push_back(qv / p.c2);
        if (qv != 0.0)
            roots.push_back(p.c0 / qv);
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    const double s = root_scale(p);
    const Polynomial q = rescaled(p, s);
    Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
    companion(0, 0) = -q.c2 / q.c3;
    companion(0, 1) = -q.c1 / q.c3;
    companion(0, 2) = -q.c0 / q.c3;
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, false);
    const Eigen::Vector3cd eig = solver.eigenvalues();

    switch (discriminant_sign(p)) {
    case DiscriminantSign::Negative: {
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (std::abs(eig[k].imag()) < std::abs(eig[best].imag()))
                best = k;
        roots.push_back(eig[best].real());
        break;
    }
    case DiscriminantSign::Positive:
        for (int k = 0; k < 3; ++k)
            roots.push_back(eig[k].real());
        break;
    case DiscriminantSign::Zero:
        for (int k = 0; k < 3; ++k)
            if (std::abs(eig[k].imag()) <= 1e-6)
                roots.push_back(eig[k].real());
        break;
    }
    for (double &r : roots)
        r = s * polish_root(q, r);
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace ptring::cubic
