#ifndef RPCC_GMM_HPP
#define RPCC_GMM_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "rpcc/geometry.hpp"

namespace rpcc {

// 3D Gaussian mixture with fixed uniform component weights 1/C.
struct Gmm3 {
  std::vector<Vec3> means;
  std::vector<Mat3> covariances;
  int count() const { return static_cast<int>(means.size()); }
};

struct Gmm2 {
  std::vector<Vec2> means;
  std::vector<Mat2> covariances;
  int count() const { return static_cast<int>(means.size()); }
};

constexpr double kCovarianceFloor = 1e-4;  // m^2

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic per-box RNG seed from the box center coordinates.
inline uint64_t box_seed(const OrientedBox& box) {
  uint64_t h = splitmix64(std::bit_cast<uint64_t>(box.center.x()));
  h = splitmix64(h ^ std::bit_cast<uint64_t>(box.center.y()));
  h = splitmix64(h ^ std::bit_cast<uint64_t>(box.center.z()));
  return h;
}

inline double gmm_log_density(const Gmm3& g, const Vec3& p) {
  constexpr double log2pi = 1.8378770664093454836;  // log(2*pi)
  const int k = g.count();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(k);
  for (int c = 0; c < k; ++c) {
    const Eigen::LLT<Mat3> llt(g.covariances[c]);
    const Mat3 l = llt.matrixL();
    const Vec3 sol = llt.solve(p - g.means[c]);
    const double log_det = 2.0 * std::log(l(0, 0) * l(1, 1) * l(2, 2));
    terms[c] = -0.5 * ((p - g.means[c]).dot(sol) + log_det + 3.0 * log2pi) - std::log(double(k));
    best = std::max(best, terms[c]);
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - best);
  return best + std::log(acc);
}

inline double gmm_log_likelihood(const Gmm3& g, const std::vector<Vec3>& points) {
  double ll = 0.0;
  for (const Vec3& p : points) ll += gmm_log_density(g, p);
  return ll;
}

namespace detail {

inline std::vector<Vec3> kmeanspp_seeds(const std::vector<Vec3>& pts, int k, std::mt19937_64& rng) {
  std::vector<Vec3> centers;
  centers.reserve(k);
  std::uniform_int_distribution<std::size_t> first(0, pts.size() - 1);
  centers.push_back(pts[first(rng)]);
  std::vector<double> d2(pts.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vec3& c : centers) best = std::min(best, (pts[i] - c).squaredNorm());
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(pts[first(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng), acc = 0.0;
    std::size_t pick = pts.size() - 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      acc += d2[i];
      if (acc >= target) { pick = i; break; }
    }
    centers.push_back(pts[pick]);
  }
  return centers;
}

inline Mat3 floor_covariance(const Mat3& s) {
  const Eigen::SelfAdjointEigenSolver<Mat3> es(s);
  if (es.eigenvalues().minCoeff() < kCovarianceFloor) return s + kCovarianceFloor * Mat3::Identity();
  return s;
}

}  // namespace detail

// EM fit with uniform fixed weights. Components are reduced to
// max(1, count/3) when the sample is too small for the requested k.
inline Gmm3 fit_gmm(const std::vector<Vec3>& points, int k_components, int max_iter = 100,
                    double tol = 1e-6, uint64_t seed = 0,
                    std::vector<double>* ll_trace = nullptr) {
  if (points.empty()) throw std::invalid_argument("fit_gmm: empty point list");
  if (k_components < 1) throw std::invalid_argument("fit_gmm: k_components must be positive");
  const std::size_t n = points.size();
  int k = k_components;
  if (n < static_cast<std::size_t>(3 * k)) k = std::max<int>(1, static_cast<int>(n / 3));

  std::mt19937_64 rng(splitmix64(seed));
  Gmm3 g;
  g.means = detail::kmeanspp_seeds(points, k, rng);

  // deterministic Lloyd refinement so EM starts from the k-means partition
  std::vector<int> assign(n, -1);
  for (int it = 0; it < 25; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_sq = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double sq = (points[i] - g.means[c]).squaredNorm();
        if (sq < best_sq) {
          best_sq = sq;
          best = c;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (int c = 0; c < k; ++c) {
      Vec3 acc = Vec3::Zero();
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (assign[i] == c) {
          acc += points[i];
          ++count;
        }
      if (count > 0) g.means[c] = acc / double(count);
    }
  }

  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= double(n);
  Mat3 global = Mat3::Zero();
  for (const Vec3& p : points) global += (p - mean) * (p - mean).transpose();
  global /= double(n);
  g.covariances.assign(k, detail::floor_covariance(global));
  for (int c = 0; c < k; ++c) {  // per-cluster covariance where the cluster is big enough
    Mat3 cov = Mat3::Zero();
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (assign[i] == c) {
        cov += (points[i] - g.means[c]) * (points[i] - g.means[c]).transpose();
        ++count;
      }
    if (count >= 4) g.covariances[c] = detail::floor_covariance(cov / double(count));
  }

  constexpr double log2pi = 1.8378770664093454836;
  std::vector<double> resp(n * k);
  double ll_prev = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // E step
    std::vector<Eigen::LLT<Mat3>> llts;
    std::vector<double> log_dets(k);
    llts.reserve(k);
    for (int c = 0; c < k; ++c) {
      llts.emplace_back(g.covariances[c]);
      const Mat3 l = llts[c].matrixL();
      log_dets[c] = 2.0 * std::log(l(0, 0) * l(1, 1) * l(2, 2));
    }
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const Vec3 d = points[i] - g.means[c];
        const double lp =
            -0.5 * (d.dot(llts[c].solve(d)) + log_dets[c] + 3.0 * log2pi) - std::log(double(k));
        resp[i * k + c] = lp;
        best = std::max(best, lp);
      }
      double acc = 0.0;
      for (int c = 0; c < k; ++c) acc += std::exp(resp[i * k + c] - best);
      const double lse = best + std::log(acc);
      ll += lse;
      for (int c = 0; c < k; ++c) resp[i * k + c] = std::exp(resp[i * k + c] - lse);
    }
    if (ll_trace) ll_trace->push_back(ll);
    if (std::abs(ll - ll_prev) < tol) break;
    ll_prev = ll;
    // M step (weights stay 1/k)
    for (int c = 0; c < k; ++c) {
      double nc = 0.0;
      Vec3 mu = Vec3::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        nc += resp[i * k + c];
        mu += resp[i * k + c] * points[i];
      }
      if (nc < 1e-12) continue;  // starved component keeps its parameters
      mu /= nc;
      Mat3 cov = Mat3::Zero();
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 d = points[i] - mu;
        cov += resp[i * k + c] * (d * d.transpose());
      }
      cov /= nc;
      g.means[c] = mu;
      g.covariances[c] = detail::floor_covariance(cov);
    }
  }
  return g;
}

// Marginalize onto the x-y plane.
inline Gmm2 project_gmm(const Gmm3& g) {
  Gmm2 out;
  out.means.reserve(g.count());
  out.covariances.reserve(g.count());
  for (int c = 0; c < g.count(); ++c) {
    out.means.emplace_back(g.means[c].x(), g.means[c].y());
    out.covariances.push_back(g.covariances[c].topLeftCorner<2, 2>());
  }
  return out;
}

inline double gmm2_density(const Gmm2& g, const Vec2& p) {
  constexpr double two_pi = 6.283185307179586477;
  const int k = g.count();
  double acc = 0.0;
  for (int c = 0; c < k; ++c) {
    const Mat2& cov = g.covariances[c];
    const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
    const Vec2 d = p - g.means[c];
    const double q = (cov(1, 1) * d.x() * d.x() - (cov(0, 1) + cov(1, 0)) * d.x() * d.y() +
                      cov(0, 0) * d.y() * d.y()) / det;
    acc += std::exp(-0.5 * q) / (two_pi * std::sqrt(det));
  }
  return acc / double(k);
}

}  // namespace rpcc

#endif  // RPCC_GMM_HPP
