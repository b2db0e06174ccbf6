#include "sensakit/gp.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>

#include <Eigen/Dense>

#include "sensakit/error.hpp"

namespace sensakit {
namespace {

constexpr double kJitterFirst = 1e-10;
constexpr double kJitterLast = 1e-4;
constexpr int kRefineSteps = 20;

constexpr double kStartLengthLo = 1e-2, kStartLengthHi = 1e1;
constexpr double kStartSignalLo = 1e-2, kStartSignalHi = 1e2;
constexpr double kStartNoiseLo = 1e-8, kStartNoiseHi = 1e-1;
constexpr double kBoundLengthLo = 1e-3, kBoundLengthHi = 1e3;
constexpr double kBoundSignalLo = 1e-4, kBoundSignalHi = 1e4;
constexpr double kBoundNoiseLo = 1e-10, kBoundNoiseHi = 1e1;

// Noise-free part of the kernel matrix.
Eigen::MatrixXd signal_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const GpHyperparameters& hp) {
  const Eigen::Index d = a.cols();
  Eigen::ArrayXd inv(d);
  for (Eigen::Index j = 0; j < d; ++j) inv[j] = 1.0 / hp.length_scales[static_cast<std::size_t>(j)];
  const Eigen::MatrixXd sa = a * inv.matrix().asDiagonal();
  const Eigen::MatrixXd sb = b * inv.matrix().asDiagonal();
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      const double q = (sa.row(i) - sb.row(r)).squaredNorm();
      k(i, r) = hp.signal_variance * std::exp(-0.5 * q);
    }
  }
  return k;
}

struct Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;
};

// Cholesky of signal + (noise + jitter) I with escalating jitter.
std::optional<Factor> factor(const Eigen::MatrixXd& signal, const GpHyperparameters& hp) {
  for (double rel = kJitterFirst; rel <= kJitterLast * 1.0000001; rel *= 10.0) {
    Factor f;
    f.jitter = rel * hp.signal_variance;
    Eigen::MatrixXd k = signal;
    k.diagonal().array() += hp.noise_variance + f.jitter;
    f.llt.compute(k);
    if (f.llt.info() == Eigen::Success) {
      return f;
    }
  }
  return std::nullopt;
}

bool valid(const GpHyperparameters& hp, std::size_t d) {
  if (hp.length_scales.size() != d || !(hp.signal_variance > 0.0) || !(hp.noise_variance >= 0.0)) return false;
  return std::all_of(hp.length_scales.begin(), hp.length_scales.end(), [](double l) { return l > 0.0; });
}

Eigen::MatrixXd unit_map(const Eigen::MatrixXd& x, const std::vector<Bounds>& domain) {
  if (domain.empty()) return x;
  Eigen::MatrixXd u(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Bounds& b = domain[static_cast<std::size_t>(j)];
    u.col(j) = (x.col(j).array() - b.lower) / b.width();
  }
  return u;
}

void check_domain(const std::vector<Bounds>& domain, Eigen::Index d) {
  if (!domain.empty() && domain.size() != static_cast<std::size_t>(d)) {
    throw Error(ErrorCode::dimension_mismatch, "gp: domain size differs from input dimension");
  }
  for (const Bounds& b : domain) {
    if (!(b.width() > 0.0)) throw Error(ErrorCode::invalid_argument, "gp: domain bounds must have positive width");
  }
}

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); }

}  // namespace

double gp_log_marginal_likelihood(const Eigen::MatrixXd& unit_x, const Eigen::VectorXd& y,
                                  const GpHyperparameters& hyper, Eigen::VectorXd* gradient) {
  const Eigen::Index n = unit_x.rows();
  const Eigen::Index d = unit_x.cols();
  if (y.size() != n) throw Error(ErrorCode::length_mismatch, "gp likelihood: output length differs from inputs");
  if (!valid(hyper, static_cast<std::size_t>(d))) {
    throw Error(ErrorCode::invalid_argument, "gp likelihood: hyperparameters must be positive and match dimension");
  }
  const Eigen::MatrixXd signal = signal_kernel(unit_x, unit_x, hyper);
  const auto f = factor(signal, hyper);
  if (!f) return -std::numeric_limits<double>::infinity();

  const Eigen::VectorXd alpha = f->llt.solve(y);
  const auto& l = f->llt.matrixLLT();
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det_half += std::log(l(i, i));
  const double lml =
      -0.5 * y.dot(alpha) - log_det_half - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  if (gradient != nullptr) {
    gradient->resize(d + 2);
    const Eigen::MatrixXd k_inv = f->llt.solve(Eigen::MatrixXd::Identity(n, n));
    // W = alpha alpha^T - K^-1; dL/dtheta = 1/2 sum(W o dK/dtheta).
    const Eigen::MatrixXd w = alpha * alpha.transpose() - k_inv;
    const Eigen::MatrixXd wk = w.cwiseProduct(signal);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double inv_l2 = 1.0 / (hyper.length_scales[static_cast<std::size_t>(j)] *
                                   hyper.length_scales[static_cast<std::size_t>(j)]);
      double acc = 0.0;
      for (Eigen::Index c = 0; c < n; ++c) {
        const double xc = unit_x(c, j);
        for (Eigen::Index r = 0; r < n; ++r) {
          const double diff = unit_x(r, j) - xc;
          acc += wk(r, c) * diff * diff;
        }
      }
      (*gradient)[j] = 0.5 * acc * inv_l2;
    }
    (*gradient)[d] = 0.5 * wk.sum();
    (*gradient)[d + 1] = 0.5 * hyper.noise_variance * w.trace();
  }
  return lml;
}

Eigen::MatrixXd GpModel::to_unit(const Eigen::MatrixXd& x) const { return unit_map(x, domain_); }

GpModel GpModel::condition(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<Bounds> domain,
                           const GpHyperparameters& hyper) {
  if (x.rows() < 1) throw Error(ErrorCode::invalid_argument, "gp: need at least one training point");
  if (y.size() != x.rows()) throw Error(ErrorCode::length_mismatch, "gp: output length differs from inputs");
  check_domain(domain, x.cols());
  if (!valid(hyper, static_cast<std::size_t>(x.cols()))) {
    throw Error(ErrorCode::invalid_argument, "gp: hyperparameters must be positive and match dimension");
  }
  GpModel m;
  m.domain_ = std::move(domain);
  m.hyper_ = hyper;
  m.unit_x_ = m.to_unit(x);
  m.offset_ = y.mean();
  const Eigen::VectorXd yc = y.array() - m.offset_;
  const Eigen::MatrixXd signal = signal_kernel(m.unit_x_, m.unit_x_, hyper);
  const auto f = factor(signal, hyper);
  if (!f) throw Error(ErrorCode::ill_conditioned_fit, "gp: kernel matrix not positive definite after jitter 1e-4");
  m.jitter_ = f->jitter;
  m.alpha_ = f->llt.solve(yc);
  if (hyper.noise_variance == 0.0) {
    // Interpolating model: refine against the kernel without jitter so the
    // training outputs are reproduced beyond the jitter's own error.
    double best = (signal * m.alpha_ - yc).squaredNorm();
    for (int it = 0; it < kRefineSteps && best > 0.0; ++it) {
      const Eigen::VectorXd next = m.alpha_ + f->llt.solve(yc - signal * m.alpha_);
      const double r = (signal * next - yc).squaredNorm();
      if (!(r < best)) break;
      best = r;
      m.alpha_ = next;
    }
  }
  m.log_likelihood_ = gp_log_marginal_likelihood(m.unit_x_, yc, hyper);
  return m;
}

Eigen::VectorXd GpModel::predict_mean(const Eigen::MatrixXd& x) const {
  if (x.rows() == 0) return Eigen::VectorXd(0);
  if (x.cols() != unit_x_.cols()) throw Error(ErrorCode::dimension_mismatch, "gp predict: input dimension differs");
  const Eigen::MatrixXd k = signal_kernel(to_unit(x), unit_x_, hyper_);
  return (k * alpha_).array() + offset_;
}

Eigen::VectorXd gp_predict_mean(const GpModel& model, const Eigen::MatrixXd& x) { return model.predict_mean(x); }

GpModel gp_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<Bounds>& domain,
               const GpFitOptions& options, Rng& rng) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw Error(ErrorCode::invalid_argument, "gp fit: need at least 2 training points");
  if (y.size() != n) throw Error(ErrorCode::length_mismatch, "gp fit: output length differs from inputs");
  if (options.restarts < 1) throw Error(ErrorCode::invalid_argument, "gp fit: need at least one restart");

  check_domain(domain, d);
  const Eigen::MatrixXd ux = unit_map(x, domain);
  const Eigen::VectorXd yc = y.array() - y.mean();
  double var = n > 1 ? yc.squaredNorm() / static_cast<double>(n - 1) : 0.0;
  if (!(var > 0.0)) var = 1.0;

  const bool free_noise = options.optimize_noise;
  const Eigen::Index p = d + 1 + (free_noise ? 1 : 0);
  const double fixed_noise = options.fixed_noise_ratio * var;

  auto unpack = [&](const Eigen::VectorXd& theta) {
    GpHyperparameters hp;
    hp.length_scales.resize(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) hp.length_scales[static_cast<std::size_t>(j)] = std::exp(theta[j]);
    hp.signal_variance = std::exp(theta[d]);
    hp.noise_variance = free_noise ? std::exp(theta[d + 1]) : fixed_noise;
    return hp;
  };
  auto pack = [&](const GpHyperparameters& hp) {
    Eigen::VectorXd theta(p);
    for (Eigen::Index j = 0; j < d; ++j) theta[j] = std::log(hp.length_scales[static_cast<std::size_t>(j)]);
    theta[d] = std::log(hp.signal_variance);
    if (free_noise) theta[d + 1] = std::log(hp.noise_variance);
    return theta;
  };

  Eigen::VectorXd lower(p), upper(p);
  lower.head(d).setConstant(std::log(kBoundLengthLo));
  upper.head(d).setConstant(std::log(kBoundLengthHi));
  lower[d] = std::log(kBoundSignalLo * var);
  upper[d] = std::log(kBoundSignalHi * var);
  if (free_noise) {
    lower[d + 1] = std::log(kBoundNoiseLo * var);
    upper[d + 1] = std::log(kBoundNoiseHi * var);
  }

  const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    Eigen::VectorXd full;
    const double lml = gp_log_marginal_likelihood(ux, yc, unpack(theta), &full);
    if (!std::isfinite(lml)) return std::numeric_limits<double>::infinity();
    grad = -full.head(p);
    return -lml;
  };

  std::vector<GpRestart> trace;
  trace.reserve(options.restarts);
  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    GpHyperparameters start;
    start.length_scales.resize(static_cast<std::size_t>(d));
    for (auto& l : start.length_scales) l = log_uniform(rng, kStartLengthLo, kStartLengthHi);
    start.signal_variance = log_uniform(rng, kStartSignalLo, kStartSignalHi) * var;
    const double noise_draw = log_uniform(rng, kStartNoiseLo, kStartNoiseHi) * var;
    start.noise_variance = free_noise ? noise_draw : fixed_noise;

    GpRestart rec;
    rec.start = start;
    rec.start_log_likelihood = gp_log_marginal_likelihood(ux, yc, start);
    const MinimizeResult res = minimize_box(objective, pack(start), lower, upper, options.optimizer);
    rec.result = unpack(res.x);
    rec.log_likelihood = std::isfinite(res.value) ? -res.value : -std::numeric_limits<double>::infinity();
    if (std::isfinite(rec.log_likelihood) && (!best || rec.log_likelihood > trace[*best].log_likelihood)) {
      best = trace.size();
    }
    trace.push_back(std::move(rec));
  }
  if (!best) throw Error(ErrorCode::ill_conditioned_fit, "gp fit: no restart produced a factorable kernel matrix");

  GpModel model = GpModel::condition(x, y, domain, trace[*best].result);
  model.restarts_ = std::move(trace);
  return model;
}

Dataset gp_augment(const GpModel& model, const Dataset& training, const Dataset& extra) {
  if (!training.has_output()) throw Error(ErrorCode::invalid_argument, "gp augment: training set has no output");
  if (extra.size() == 0) return training;
  if (extra.input_count() != training.input_count()) {
    throw Error(ErrorCode::dimension_mismatch, "gp augment: extra inputs differ in dimension");
  }
  Eigen::MatrixXd xe(extra.size(), extra.input_count());
  for (std::size_t k = 0; k < extra.input_count(); ++k) {
    const auto col = extra.input(k);
    for (std::size_t i = 0; i < col.size(); ++i) xe(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = col[i];
  }
  const Eigen::VectorXd pred = model.predict_mean(xe);

  std::vector<Column> cols;
  for (std::size_t k = 0; k < training.input_count(); ++k) {
    Column c = training.input_column(k);
    const auto more = extra.input(k);
    c.values.insert(c.values.end(), more.begin(), more.end());
    cols.push_back(std::move(c));
  }
  Column out = training.output_column();
  out.values.insert(out.values.end(), pred.data(), pred.data() + pred.size());
  cols.push_back(std::move(out));
  return Dataset(std::move(cols), training.provenance().empty() ? "gp-augmented" : training.provenance() + "+gp");
}

CvResult cv_scores(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() != predicted.size()) throw Error(ErrorCode::length_mismatch, "cv: prediction length differs");
  const double ss_tot = (truth.array() - truth.mean()).square().sum();
  if (!(ss_tot > 0.0)) throw Error(ErrorCode::degenerate_output, "cv: constant output has zero total variance");
  CvResult res;
  res.fraction = (truth - predicted).squaredNorm() / ss_tot;
  res.r2 = 1.0 - res.fraction;
  res.predictions = predicted;
  return res;
}

CvResult cross_validate(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<Bounds>& domain,
                        std::size_t folds, const GpFitOptions& options, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(x.rows());
  if (static_cast<std::size_t>(y.size()) != n) throw Error(ErrorCode::length_mismatch, "cv: output length differs");
  if (folds < 2 || folds > n) throw Error(ErrorCode::invalid_argument, "cv: need 2 <= folds <= L");
  if (!(y.array() != y[0]).any()) throw Error(ErrorCode::degenerate_output, "cv: constant output has zero total variance");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::size_t> fold_of(n);
  for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = i % folds;

  Eigen::VectorXd pred(static_cast<Eigen::Index>(n));
  std::vector<Rng> streams;
  streams.reserve(folds);
  for (std::size_t f = 0; f < folds; ++f) streams.push_back(rng.split(f));

  std::vector<std::exception_ptr> failures(folds);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t f = 0; f < folds; ++f) {
    try {
      std::vector<Eigen::Index> train, test;
      for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
      const Eigen::MatrixXd xt = x(train, Eigen::all);
      const Eigen::VectorXd yt = y(train);
      const GpModel m = gp_fit(xt, yt, domain, options, streams[f]);
      const Eigen::VectorXd p = m.predict_mean(x(test, Eigen::all));
      for (std::size_t t = 0; t < test.size(); ++t) pred[test[t]] = p[static_cast<Eigen::Index>(t)];
    } catch (...) {
      failures[f] = std::current_exception();
    }
  }
  for (const auto& e : failures) {
    if (e) std::rethrow_exception(e);
  }
  return cv_scores(y, pred);
}

void write_model_dump(std::ostream& out, const GpModel& model) {
  auto num = [](double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  };
  const GpHyperparameters& hp = model.hyperparameters();
  out << "kernel = squared-exponential\n";
  out << "dimension = " << model.dimension() << '\n';
  out << "training_size = " << model.training_size() << '\n';
  for (std::size_t j = 0; j < hp.length_scales.size(); ++j) {
    out << "length_scale_" << (j + 1) << " = " << num(hp.length_scales[j]) << '\n';
  }
  out << "signal_variance = " << num(hp.signal_variance) << '\n';
  out << "noise_variance = " << num(hp.noise_variance) << '\n';
  out << "mean_offset = " << num(model.mean_offset()) << '\n';
  out << "jitter = " << num(model.jitter()) << '\n';
  out << "log_likelihood = " << num(model.log_likelihood()) << '\n';
}

}  // namespace sensakit
