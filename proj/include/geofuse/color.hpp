#pragma once

#include <geofuse/error.hpp>

#include <Eigen/Core>
#include <Eigen/LU>

#include <cmath>

namespace geofuse {

template <typename Scalar>
using Color3 = Eigen::Matrix<Scalar, 3, 1>;

namespace detail {

// sRGB primaries to CIE XYZ, D65 white.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> srgb_to_xyz_matrix()
{
    Eigen::Matrix<Scalar, 3, 3> m;
    m << Scalar(0.4124564), Scalar(0.3575761), Scalar(0.1804375),
         Scalar(0.2126729), Scalar(0.7151522), Scalar(0.0721750),
         Scalar(0.0193339), Scalar(0.1191920), Scalar(0.9503041);
    return m;
}

template <typename Scalar>
Scalar srgb_decode(Scalar c)
{
    using std::pow;
    return c <= Scalar(0.04045) ? c / Scalar(12.92) : pow((c + Scalar(0.055)) / Scalar(1.055), Scalar(2.4));
}

template <typename Scalar>
Scalar srgb_encode(Scalar c)
{
    using std::pow;
    return c <= Scalar(0.0031308) ? c * Scalar(12.92) : Scalar(1.055) * pow(c, Scalar(1) / Scalar(2.4)) - Scalar(0.055);
}

template <typename Scalar>
Scalar lab_f(Scalar t)
{
    using std::cbrt;
    const Scalar delta = Scalar(6) / Scalar(29);
    return t > delta * delta * delta ? cbrt(t) : t / (Scalar(3) * delta * delta) + Scalar(4) / Scalar(29);
}

template <typename Scalar>
Scalar lab_f_inv(Scalar f)
{
    const Scalar delta = Scalar(6) / Scalar(29);
    return f > delta ? f * f * f : Scalar(3) * delta * delta * (f - Scalar(4) / Scalar(29));
}

} // namespace detail

/// sRGB in [0,1]^3 to CIELAB (D65). The white point is the image of (1,1,1)
/// under the primaries matrix, so white maps to (100, 0, 0).
template <typename Derived>
Color3<typename Derived::Scalar> srgb_to_lab(const Eigen::MatrixBase<Derived>& rgb)
{
    using Scalar = typename Derived::Scalar;
    for (int c = 0; c < 3; ++c) {
        if (!(rgb(c) >= Scalar(0) && rgb(c) <= Scalar(1))) throw InvalidArgument("sRGB component outside [0,1]");
    }
    const auto m = detail::srgb_to_xyz_matrix<Scalar>();
    const Color3<Scalar> white = m * Color3<Scalar>::Ones();
    Color3<Scalar> linear;
    for (int c = 0; c < 3; ++c) linear(c) = detail::srgb_decode(Scalar(rgb(c)));
    const Color3<Scalar> xyz = (m * linear).cwiseQuotient(white);
    const Scalar fx = detail::lab_f(xyz(0));
    const Scalar fy = detail::lab_f(xyz(1));
    const Scalar fz = detail::lab_f(xyz(2));
    return Color3<Scalar>(Scalar(116) * fy - Scalar(16), Scalar(500) * (fx - fy), Scalar(200) * (fy - fz));
}

/// Inverse of srgb_to_lab. Out-of-gamut results are not clamped.
template <typename Derived>
Color3<typename Derived::Scalar> lab_to_srgb(const Eigen::MatrixBase<Derived>& lab)
{
    using Scalar = typename Derived::Scalar;
    const auto m = detail::srgb_to_xyz_matrix<Scalar>();
    const Color3<Scalar> white = m * Color3<Scalar>::Ones();
    const Scalar fy = (Scalar(lab(0)) + Scalar(16)) / Scalar(116);
    const Scalar fx = fy + Scalar(lab(1)) / Scalar(500);
    const Scalar fz = fy - Scalar(lab(2)) / Scalar(200);
    const Color3<Scalar> xyz(detail::lab_f_inv(fx), detail::lab_f_inv(fy), detail::lab_f_inv(fz));
    const Color3<Scalar> linear = m.inverse() * xyz.cwiseProduct(white);
    Color3<Scalar> rgb;
    for (int c = 0; c < 3; ++c) rgb(c) = detail::srgb_encode(linear(c));
    return rgb;
}

} // namespace geofuse
