#pragma once

#include <cmath>
#include <ostream>

namespace gbk {

/// Velocity-space vector. Components are in thermal-speed units of the bath.
struct Vec3 {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr Vec3() noexcept = default;
    constexpr Vec3(double x_, double y_, double z_) noexcept : x{x_}, y{y_}, z{z_} {}

    constexpr double& operator[](int i) noexcept { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](int i) const noexcept { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3& operator+=(Vec3 const& o) noexcept
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr Vec3& operator-=(Vec3 const& o) noexcept
    {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    constexpr Vec3& operator*=(double s) noexcept
    {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }

    friend constexpr Vec3 operator+(Vec3 a, Vec3 const& b) noexcept { return a += b; }
    friend constexpr Vec3 operator-(Vec3 a, Vec3 const& b) noexcept { return a -= b; }
    friend constexpr Vec3 operator-(Vec3 const& a) noexcept { return {-a.x, -a.y, -a.z}; }
    friend constexpr Vec3 operator*(Vec3 a, double s) noexcept { return a *= s; }
    friend constexpr Vec3 operator*(double s, Vec3 a) noexcept { return a *= s; }
    friend constexpr Vec3 operator/(Vec3 a, double s) noexcept { return a *= (1.0 / s); }
    friend constexpr bool operator==(Vec3 const&, Vec3 const&) noexcept = default;

    friend std::ostream& operator<<(std::ostream& os, Vec3 const& v)
    {
        return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
    }
};

[[nodiscard]] constexpr double dot(Vec3 const& a, Vec3 const& b) noexcept
{
    return a.x * b.x + a.y * b.y + a.z * b.z;
}
[[nodiscard]] constexpr Vec3 cross(Vec3 const& a, Vec3 const& b) noexcept
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
[[nodiscard]] constexpr double norm2(Vec3 const& a) noexcept { return dot(a, a); }
[[nodiscard]] inline double norm(Vec3 const& a) noexcept { return std::sqrt(norm2(a)); }
[[nodiscard]] inline bool is_finite(Vec3 const& a) noexcept
{
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Japanese bracket <v> = sqrt(1 + |v|^2).
[[nodiscard]] inline double bracket(double r) noexcept { return std::sqrt(1.0 + r * r); }
[[nodiscard]] inline double bracket(Vec3 const& v) noexcept { return std::sqrt(1.0 + norm2(v)); }

} // namespace gbk
