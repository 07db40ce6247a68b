#include "permqfi/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "permqfi/error.hpp"

namespace permqfi {

namespace {

// Hairer's DOP853 tableau.
constexpr int kStages = 12;

constexpr double kC[kStages] = {
    0.0,
    0.526001519587677318785587544488e-01,
    0.789002279381515978178381316732e-01,
    0.118350341907227396726757197510,
    0.281649658092772603273242802490,
    0.333333333333333333333333333333,
    0.25,
    0.307692307692307692307692307692,
    0.651282051282051282051282051282,
    0.6,
    0.857142857142857142857142857142,
    1.0,
};

constexpr double kA[kStages + 1][kStages] = {
    {},
    {5.26001519587677318785587544488e-2},
    {1.97250569845378994544595329183e-2, 5.91751709536136983633785987549e-2},
    {2.95875854768068491816892993775e-2, 0.0, 8.87627564304205475450678981324e-2},
    {2.41365134159266685502369798665e-1, 0.0, -8.84549479328286085344864962717e-1,
     9.24834003261792003115737966543e-1},
    {3.7037037037037037037037037037e-2, 0.0, 0.0, 1.70828608729473871279604482173e-1,
     1.25467687566822425016691814123e-1},
    {3.7109375e-2, 0.0, 0.0, 1.70252211019544039314978060272e-1, 6.02165389804559606850219397283e-2,
     -1.7578125e-2},
    {3.70920001185047927108779319836e-2, 0.0, 0.0, 1.70383925712239993810214054705e-1,
     1.07262030446373284651809199168e-1, -1.53194377486244017527936158236e-2,
     8.27378916381402288758473766002e-3},
    {6.24110958716075717114429577812e-1, 0.0, 0.0, -3.36089262944694129406857109825,
     -8.68219346841726006818189891453e-1, 2.75920996994467083049415600797e1, 2.01540675504778934086186788979e1,
     -4.34898841810699588477366255144e1},
    {4.77662536438264365890433908527e-1, 0.0, 0.0, -2.48811461997166764192642586468,
     -5.90290826836842996371446475743e-1, 2.12300514481811942347288949897e1, 1.52792336328824235832596922938e1,
     -3.32882109689848629194453265587e1, -2.03312017085086261358222928593e-2},
    {-9.3714243008598732571704021658e-1, 0.0, 0.0, 5.18637242884406370830023853209,
     1.09143734899672957818500254654, -8.14978701074692612513997267357, -1.85200656599969598641566180701e1,
     2.27394870993505042818970056734e1, 2.49360555267965238987089396762, -3.0467644718982195003823669022},
    {2.27331014751653820792359768449, 0.0, 0.0, -1.05344954667372501984066689879e1,
     -2.00087205822486249909675718444, -1.79589318631187989172765950534e1, 2.79488845294199600508499808837e1,
     -2.85899827713502369474065508674, -8.87285693353062954433549289258, 1.23605671757943030647266201528e1,
     6.43392746015763530355970484046e-1},
    // final weights
    {5.42937341165687622380535766363e-2, 0.0, 0.0, 0.0, 0.0, 4.45031289275240888144113950566,
     1.89151789931450038304281599044, -5.8012039600105847814672114227, 3.1116436695781989440891606237e-1,
     -1.52160949662516078556178806805e-1, 2.01365400804030348374776537501e-1,
     4.47106157277725905176885569043e-2},
};

constexpr const double (&kB)[kStages] = kA[kStages];

constexpr double kE3Shift[kStages] = {
    0.244094488188976377952755905512, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.733846688281611857341361741547,
    0.0, 0.0, 0.220588235294117647058823529412e-1,
};

constexpr double kE5[kStages] = {
    0.1312004499419488073250102996e-1,
    0.0,
    0.0,
    0.0,
    0.0,
    -0.1225156446376204440720569753e+1,
    -0.4957589496572501915214079952,
    0.1664377182454986536961530415e+1,
    -0.3503288487499736816886487290,
    0.3341791187130174790297318841,
    0.8192320648511571246570742613e-1,
    -0.2235530786388629525884427845e-1,
};

constexpr double kErrorExponent = -1.0 / 8.0;

}  // namespace

void IntegratorConfig::validate() const {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw InvalidArgument("integrator tolerances must be positive");
  if (!(max_step > 0.0)) throw InvalidArgument("max_step must be positive");
  if (first_step < 0.0) throw InvalidArgument("first_step must be >= 0");
  if (!(safety > 0.0 && safety < 1.0)) throw InvalidArgument("safety factor must lie in (0, 1)");
  if (!(min_factor > 0.0 && min_factor < 1.0) || !(max_factor > 1.0)) {
    throw InvalidArgument("step factors must satisfy 0 < min < 1 < max");
  }
}

Dop853::Dop853(Rhs rhs, IntegratorConfig config) : rhs_(std::move(rhs)), config_(config) { config_.validate(); }

double Dop853::error_norm(double h, const Eigen::VectorXcd& y, const Eigen::VectorXcd& y_new) const {
  double err5 = 0.0, err3 = 0.0;
  const Eigen::Index n = y.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale = config_.atol + config_.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    std::complex<double> e5{}, e3{};
    for (int s = 0; s < kStages; ++s) {
      const std::complex<double> ks = k_[s][i];
      e5 += kE5[s] * ks;
      e3 += (kB[s] - kE3Shift[s]) * ks;
    }
    err5 += std::norm(e5 / scale);
    err3 += std::norm(e3 / scale);
  }
  if (err5 == 0.0 && err3 == 0.0) return 0.0;
  const double denom = err5 + 0.01 * err3;
  return std::abs(h) * err5 / std::sqrt(denom * static_cast<double>(n));
}

double Dop853::initial_step(double t0, const Eigen::VectorXcd& y, const Eigen::VectorXcd& f, double t_end) {
  if (config_.first_step > 0.0) return std::min(config_.first_step, config_.max_step);
  const double interval = t_end - t0;
  const auto rms = [&](const Eigen::VectorXcd& v, const Eigen::VectorXcd& ref) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      sum += std::norm(v[i] / (config_.atol + config_.rtol * std::abs(ref[i])));
    }
    return std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(v.size(), 1)));
  };
  const double d0 = rms(y, y);
  const double d1 = rms(f, y);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, interval);
  Eigen::VectorXcd y1 = y + h0 * f;
  Eigen::VectorXcd f1(y.size());
  rhs_(t0 + h0, y1, f1);
  ++stats_.rhs_evaluations;
  const double d2 = rms(f1 - f, y) / h0;
  double h1;
  if (d1 <= 1e-15 && d2 <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / 8.0);
  }
  return std::min({100.0 * h0, h1, interval, config_.max_step});
}

void Dop853::integrate(double t0, Eigen::VectorXcd& y, std::span<const double> times, const Observer& observe) {
  if (times.empty()) return;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t0 || (i > 0 && !(times[i] > times[i - 1]))) {
      throw InvalidArgument("output times must be strictly increasing and not precede t0");
    }
  }
  const Eigen::Index n = y.size();
  for (auto& k : k_) k.resize(n);
  stage_.resize(n);

  double t = t0;
  rhs_(t, y, k_[0]);
  ++stats_.rhs_evaluations;
  double h_abs = 0.0;
  Eigen::VectorXcd y_new(n);

  for (std::size_t idx = 0; idx < times.size(); ++idx) {
    const double target = times[idx];
    if (target == t) {
      observe(idx, t, y);
      continue;
    }
    if (h_abs == 0.0) h_abs = initial_step(t, y, k_[0], times.back());

    while (t < target) {
      const double min_step = 10.0 * std::abs(std::nextafter(t, target) - t);
      h_abs = std::clamp(h_abs, min_step, config_.max_step);
      bool rejected = false;
      for (;;) {
        if (h_abs < min_step) {
          std::ostringstream msg;
          msg << "step size underflow at t=" << t;
          throw NumericalError(msg.str());
        }
        double t_new = t + h_abs;
        if (t_new > target) t_new = target;
        const double h = t_new - t;

        for (int s = 1; s < kStages; ++s) {
          stage_ = y;
          for (int r = 0; r < s; ++r) {
            if (kA[s][r] != 0.0) stage_.noalias() += (h * kA[s][r]) * k_[r];
          }
          rhs_(t + kC[s] * h, stage_, k_[s]);
        }
        y_new = y;
        for (int s = 0; s < kStages; ++s) {
          if (kB[s] != 0.0) y_new.noalias() += (h * kB[s]) * k_[s];
        }
        stats_.rhs_evaluations += kStages - 1;

        const double err = error_norm(h, y, y_new);
        if (!std::isfinite(err)) {
          std::ostringstream msg;
          msg << "non-finite error estimate at t=" << t;
          throw NumericalError(msg.str());
        }
        if (err < 1.0) {
          double factor = err == 0.0 ? config_.max_factor
                                     : std::min(config_.max_factor, config_.safety * std::pow(err, kErrorExponent));
          if (rejected) factor = std::min(1.0, factor);
          // a step clipped onto an output time says little about the natural step
          const bool clipped = t_new == target && h < h_abs;
          if (!clipped) h_abs = h * factor;
          t = t_new;
          y.swap(y_new);
          rhs_(t, y, k_[0]);
          ++stats_.rhs_evaluations;
          ++stats_.accepted;
          if (stats_.accepted > config_.max_steps) throw NumericalError("maximum number of steps exceeded");
          break;
        }
        h_abs = h * std::max(config_.min_factor, config_.safety * std::pow(err, kErrorExponent));
        rejected = true;
        ++stats_.rejected;
      }
    }
    observe(idx, t, y);
  }
}

}  // namespace permqfi
