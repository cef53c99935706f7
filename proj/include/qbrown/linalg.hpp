#pragma once

#include <array>
#include <complex>

namespace qbrown {

using complexd = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

struct Mat3c {
    std::array<complexd, 9> m{};

    complexd& operator()(int i, int j) { return m[3 * i + j]; }
    const complexd& operator()(int i, int j) const { return m[3 * i + j]; }

    Mat3c& operator+=(const Mat3c& o) {
        for (int i = 0; i < 9; ++i) m[i] += o.m[i];
        return *this;
    }
    Mat3c operator+(const Mat3c& o) const {
        Mat3c r = *this;
        r += o;
        return r;
    }
    Mat3c operator*(const complexd& s) const {
        Mat3c r = *this;
        for (auto& e : r.m) e *= s;
        return r;
    }
    Mat3c transpose() const {
        Mat3c r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    complexd trace() const { return m[0] + m[4] + m[8]; }
};

inline Mat3c identity3c() {
    Mat3c r;
    r(0, 0) = r(1, 1) = r(2, 2) = 1.0;
    return r;
}

inline Mat2 mat2_zero() { return {{{0.0, 0.0}, {0.0, 0.0}}}; }

inline Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] + b[i][j];
    return r;
}

inline Mat2 operator*(double s, const Mat2& a) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = s * a[i][j];
    return r;
}

} // namespace qbrown
