#pragma once

#include <cmath>
#include <limits>

namespace classmap {

/// Standard normal CDF via the complementary error function.
template <typename Scalar>
Scalar normal_cdf(Scalar z) {
    using std::erfc;
    using std::sqrt;
    return Scalar(0.5) * erfc(-z / sqrt(Scalar(2)));
}

/// Standard normal quantile, Wichura's algorithm AS 241 (PPND16).
/// Relative accuracy is about 1e-16 over (0, 1); returns -inf / +inf at the
/// endpoints and NaN outside [0, 1].
template <typename Scalar>
Scalar normal_quantile(Scalar p) {
    using std::log;
    using std::sqrt;
    if (std::isnan(p) || p < Scalar(0) || p > Scalar(1))
        return std::numeric_limits<Scalar>::quiet_NaN();
    if (p == Scalar(0))
        return -std::numeric_limits<Scalar>::infinity();
    if (p == Scalar(1))
        return std::numeric_limits<Scalar>::infinity();

    const Scalar q = p - Scalar(0.5);
    if (std::abs(q) <= Scalar(0.425)) {
        const Scalar r = Scalar(0.180625) - q * q;
        const Scalar num =
            ((((((((r * Scalar(2509.0809287301226727) + Scalar(33430.575583588128105)) * r +
                   Scalar(67265.770927008700853)) * r + Scalar(45921.953931549871457)) * r +
                 Scalar(13731.693765509461125)) * r + Scalar(1971.5909503065514427)) * r +
               Scalar(133.14166789178437745)) * r + Scalar(3.387132872796366608)));
        const Scalar den =
            (((((((r * Scalar(5226.495278852545925) + Scalar(28729.085735721942674)) * r +
                  Scalar(39307.89580009271061)) * r + Scalar(21213.794301586595867)) * r +
                Scalar(5394.1960214247511077)) * r + Scalar(687.1870074920579083)) * r +
              Scalar(42.313330701600911252)) * r + Scalar(1));
        return q * num / den;
    }

    Scalar r = q < Scalar(0) ? p : Scalar(1) - p;
    r = sqrt(-log(r));
    Scalar value;
    if (r <= Scalar(5)) {
        r -= Scalar(1.6);
        value = (((((((r * Scalar(7.7454501427834140764e-4) + Scalar(0.0227238449892691845833)) * r +
                      Scalar(0.24178072517745061177)) * r + Scalar(1.27045825245236838258)) * r +
                    Scalar(3.64784832476320460504)) * r + Scalar(5.7694972214606914055)) * r +
                  Scalar(4.6303378461565452959)) * r + Scalar(1.42343711074968357734)) /
                (((((((r * Scalar(1.05075007164441684324e-9) + Scalar(5.475938084995344946e-4)) * r +
                      Scalar(0.0151986665636164571966)) * r + Scalar(0.14810397642748007459)) * r +
                    Scalar(0.68976733498510000455)) * r + Scalar(1.6763848301838038494)) * r +
                  Scalar(2.05319162663775882187)) * r + Scalar(1));
    } else {
        r -= Scalar(5);
        value = (((((((r * Scalar(2.01033439929228813265e-7) + Scalar(2.71155556874348757815e-5)) * r +
                      Scalar(0.0012426609473880784386)) * r + Scalar(0.026532189526576123093)) * r +
                    Scalar(0.29656057182850489123)) * r + Scalar(1.7848265399172913358)) * r +
                  Scalar(5.4637849111641143699)) * r + Scalar(6.6579046435011037772)) /
                (((((((r * Scalar(2.04426310338993978564e-15) + Scalar(1.4215117583164458887e-7)) * r +
                      Scalar(1.8463183175100546818e-5)) * r + Scalar(7.868691311456132591e-4)) * r +
                    Scalar(0.0148753612908506148525)) * r + Scalar(0.13692988092273580531)) * r +
                  Scalar(0.59983220655588793769)) * r + Scalar(1));
    }
    return q < Scalar(0) ? -value : value;
}

} // namespace classmap
