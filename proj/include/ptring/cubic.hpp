#ifndef PTRING_CUBIC_HPP
#define PTRING_CUBIC_HPP

#include <vector>

// Real cubic c3 x^3 + c2 x^2 + c1 x + c0 = 0 with a scaling step so that
// coefficients spanning tens of decades (saturation ~0.05 Hz against drives
// of ~1e10 s^-1) are solved at O(1).

namespace ptring::cubic
{

struct Polynomial
{
    double c3 = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    double operator()(double x) const { return ((c3 * x + c2) * x + c1) * x + c0; }
    double derivative(double x) const { return (3.0 * c3 * x + 2.0 * c2) * x + c1; }
    // Largest |term| at x, the natural yardstick for a residual.
    double term_scale(double x) const;
    double relative_residual(double x) const;
};

enum class DiscriminantSign
{
    Negative, // one real root, complex-conjugate pair
    Zero,     // repeated root
    Positive  // three distinct real roots
};

// Variable scale s such that x = s*y keeps the roots of the y-polynomial
// within the unit disk (Fujiwara bound). Only meaningful for c3 != 0.
double root_scale(const Polynomial &p);

// The y-polynomial p(s*y), normalised so its largest coefficient is 1.
Polynomial rescaled(const Polynomial &p, double s);

// Classic discriminant 18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2, with a
// relative dead band for the Zero classification.
DiscriminantSign discriminant_sign(const Polynomial &p, double rel_tol = 1e-12);
double discriminant(const Polynomial &p);

// Unique real root by the Cardano-type closed form
//   root = (x^2 - 2 b x + 4 b^2 - 12 a c) / (6 a x),
//   x^3  = -4 D1 +- 4 sqrt(D1^2 - 4 D0^3),
// with D0 = b^2 - 3ac, D1 = 2b^3 - 9abc + 27a^2 d. The sign of the square root
// follows -D1 so the two contributions never cancel. The same formula is also
// applied to the reversed polynomial (root 1/x) and the candidate with the
// smaller residual is returned. Requires a negative discriminant; no Newton
// polishing is applied.
double closed_form_real_root(const Polynomial &p);

// All real roots from the eigenvalues of the companion matrix, each polished
// by Newton iterations on the original polynomial. Sorted ascending.
std::vector<double> general_real_roots(const Polynomial &p);

// Newton polish with bisection fallback inside [x - h, x + h] when a sign
// change is available.
double polish_root(const Polynomial &p, double x);

} // namespace ptring::cubic

#endif // PTRING_CUBIC_HPP
