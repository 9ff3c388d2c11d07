#include "nnma/fourier.hpp"

#include <cmath>
#include <stdexcept>

namespace nnma {

Series Series::constant(double value, int harmonics) {
    Series s(harmonics);
    s.dc() = value;
    return s;
}

Series Series::harmonic_cos(int k, double amplitude, int harmonics) {
    Series s(harmonics);
    if (k == 0)
        s.dc() = amplitude;
    else
        s.cos_coef(k) = amplitude;
    return s;
}

Series Series::harmonic_sin(int k, double amplitude, int harmonics) {
    Series s(harmonics);
    s.sin_coef(k) = amplitude;
    return s;
}

double Series::eval(double theta) const {
    const int H = harmonics();
    double v = dc();
    for (int k = 1; k <= H; ++k)
        v += cos_coef(k) * std::cos(k * theta) + sin_coef(k) * std::sin(k * theta);
    return v;
}

Series Series::derivative_theta() const {
    const int H = harmonics();
    Series d(H);
    for (int k = 1; k <= H; ++k) {
        d.cos_coef(k) = k * sin_coef(k);
        d.sin_coef(k) = -k * cos_coef(k);
    }
    return d;
}

Series Series::resized(int harmonics) const {
    const int H = this->harmonics();
    Series out(harmonics);
    const int m = std::min(H, harmonics);
    out.dc() = dc();
    for (int k = 1; k <= m; ++k) {
        out.cos_coef(k) = cos_coef(k);
        out.sin_coef(k) = sin_coef(k);
    }
    return out;
}

namespace {

// Accumulate w * basis(k) into s where basis is cos (negative k folds via
// cos(-k)=cos(k)) or sin (sin(-k)=-sin(k)).
inline void add_cos(Series& s, int k, double w) {
    if (k < 0) k = -k;
    if (k > s.harmonics()) return;
    if (k == 0)
        s.dc() += w;
    else
        s.cos_coef(k) += w;
}

inline void add_sin(Series& s, int k, double w) {
    double sign = 1.0;
    if (k < 0) {
        k = -k;
        sign = -1.0;
    }
    if (k == 0 || k > s.harmonics()) return;
    s.sin_coef(k) += sign * w;
}

}  // namespace

Series multiply(const Series& a, const Series& b) {
    return multiply_truncated(a, b, a.harmonics() + b.harmonics());
}

Series multiply_truncated(const Series& a, const Series& b, int h_out) {
    const int Ha = a.harmonics();
    const int Hb = b.harmonics();
    Series out(std::min(h_out, Ha + Hb));

    // Treat DC as cos(0) with a zero sine partner; product-to-sum identities:
    //   cos i cos j = (cos(i-j) + cos(i+j)) / 2
    //   sin i sin j = (cos(i-j) - cos(i+j)) / 2
    //   cos i sin j = (sin(i+j) - sin(i-j)) / 2
    for (int i = 0; i <= Ha; ++i) {
        const double ac = (i == 0) ? a.dc() : a.cos_coef(i);
        const double as = (i == 0) ? 0.0 : a.sin_coef(i);
        for (int j = 0; j <= Hb; ++j) {
            const double bc = (j == 0) ? b.dc() : b.cos_coef(j);
            const double bs = (j == 0) ? 0.0 : b.sin_coef(j);
            if (ac != 0.0 && bc != 0.0) {
                add_cos(out, i - j, 0.5 * ac * bc);
                add_cos(out, i + j, 0.5 * ac * bc);
            }
            if (as != 0.0 && bs != 0.0) {
                add_cos(out, i - j, 0.5 * as * bs);
                add_cos(out, i + j, -0.5 * as * bs);
            }
            if (ac != 0.0 && bs != 0.0) {
                add_sin(out, i + j, 0.5 * ac * bs);
                add_sin(out, i - j, -0.5 * ac * bs);
            }
            if (as != 0.0 && bc != 0.0) {
                add_sin(out, i + j, 0.5 * as * bc);
                add_sin(out, i - j, 0.5 * as * bc);
            }
        }
    }
    return out;
}

Eigen::MatrixXd multiply_operator(const Series& g, int h_out, int h_in) {
    const int rows = 2 * h_out + 1;
    const int cols = 2 * h_in + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(rows, cols);
    Series unit(h_in);
    for (int c = 0; c < cols; ++c) {
        unit.coef().setZero();
        unit.coef()[c] = 1.0;
        T.col(c) = multiply_truncated(g, unit, h_out).resized(h_out).coef();
    }
    return T;
}

Series project_samples(const Eigen::VectorXd& samples, int harmonics) {
    const int n = static_cast<int>(samples.size());
    if (n < 2 * harmonics + 2)
        throw std::invalid_argument("project_samples: too few samples for requested harmonics");
    Series s(harmonics);
    s.dc() = samples.mean();
    for (int k = 1; k <= harmonics; ++k) {
        double c = 0.0, d = 0.0;
        for (int m = 0; m < n; ++m) {
            const double th = 2.0 * M_PI * k * m / n;
            c += samples[m] * std::cos(th);
            d += samples[m] * std::sin(th);
        }
        s.cos_coef(k) = 2.0 * c / n;
        s.sin_coef(k) = 2.0 * d / n;
    }
    return s;
}

}  // namespace nnma
