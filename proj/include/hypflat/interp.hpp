#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hypflat {

// Monotone cubic Hermite interpolation (Fritsch-Carlson slope limiting).
// Interpolates arbitrary data; if the data is monotone the interpolant is
// monotone too, which makes it safe for arc-length inversion.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 samples of equal length");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw std::invalid_argument("MonotoneCubic: abscissae must be strictly increasing");

        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        m_.resize(n);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // clamp endpoint slopes (Fritsch-Carlson)
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
            } else {
                const double a = m_[i] / d[i];
                const double b = m_[i + 1] / d[i];
                const double h = std::hypot(a, b);
                if (h > 3.0) {
                    m_[i] = 3.0 * a / h * d[i];
                    m_[i + 1] = 3.0 * b / h * d[i];
                }
            }
        }
    }

    double operator()(double x) const { return eval(x).first; }

    double derivative(double x) const { return eval(x).second; }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    std::pair<double, double> eval(double x) const {
        const std::size_t n = x_.size();
        std::size_t i = std::upper_bound(x_.begin(), x_.end(), x) - x_.begin();
        if (i == 0) i = 1;
        if (i >= n) i = n - 1;
        --i;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const double v = h00 * y_[i] + h * h10 * m_[i] + h01 * y_[i + 1] + h * h11 * m_[i + 1];
        const double dh00 = (6 * t2 - 6 * t) / h, dh10 = 3 * t2 - 4 * t + 1;
        const double dh01 = (-6 * t2 + 6 * t) / h, dh11 = 3 * t2 - 2 * t;
        const double dv = dh00 * y_[i] + dh10 * m_[i] + dh01 * y_[i + 1] + dh11 * m_[i + 1];
        return {v, dv};
    }

    std::vector<double> x_, y_, m_;
};

}  // namespace hypflat
