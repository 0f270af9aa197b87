#pragma once

// Bounded black-box minimisers sharing one entry point. All of them work in
// the unit cube [0,1]^n mapped affinely onto the parameter box, start from a
// given point, and spend at most `budget` objective calls.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "railcal/bounds.hpp"
#include "railcal/kernels.hpp"
#include "railcal/rng.hpp"

namespace railcal::optim {

using Point = std::vector<double>;
using Objective = std::function<double(std::span<const double>)>;

enum class Algorithm { GA, SA, NMSA, MADS, SPSA, BYO, CORS };

inline constexpr std::array<Algorithm, 7> kAllAlgorithms{Algorithm::GA,   Algorithm::SA,  Algorithm::NMSA,
                                                         Algorithm::MADS, Algorithm::SPSA, Algorithm::BYO,
                                                         Algorithm::CORS};

std::string_view algorithm_name(Algorithm a);
/// Case-insensitive; throws ConfigError for unknown names.
Algorithm parse_algorithm(std::string_view name);
/// NMSA draws no random numbers.
inline bool is_deterministic(Algorithm a) { return a == Algorithm::NMSA; }

struct GaSettings {
  int population = 6;
  double crossover_prob = 0.8;
  double mutation_prob = 0.4;
  double gene_mutation_prob = 0.2;
  double blend_alpha = 0.5;
  double mutation_sigma = 0.1;  // fraction of the box width
  int tournament_size = 2;
};

struct SaSettings {
  double visiting = 2.62;
  double acceptance = -5.0;
  double initial_temp = 5230.0;
  double restart_temp_ratio = 2e-5;
};

struct NmsaSettings {
  double initial_step = 0.05;  // fraction of the box width
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double penalty = 1e12;
};

struct MadsSettings {
  double initial_poll = 0.1;
  double max_poll = 1.0;
  double min_poll = 1e-12;
};

struct SpsaSettings {
  double a = 0.001;
  double c = 0.007;
  double alpha = 0.602;
  double gamma = 0.101;
  double stability_fraction = 0.1;  // A = fraction * budget
};

struct ByoSettings {
  int initial_points = 5;
  int refit_every = 5;
  double jitter = 1e-6;
  int starts = 64;
  double xi = 0.0;
};

struct CorsSettings {
  double initial_fraction = 0.2;
  std::vector<double> distance_cycle{0.9, 0.75, 0.25, 0.05, 0.03, 0.0};
  int candidates = 1000;
  int starts = 16;
  double min_distance = 1e-5;
};

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::CORS;
  int budget = 100;
  std::uint64_t seed = 0;
  GaSettings ga;
  SaSettings sa;
  NmsaSettings nmsa;
  MadsSettings mads;
  SpsaSettings spsa;
  ByoSettings byo;
  CorsSettings cors;
};

/// Hyperparameters of the configured algorithm as name/value strings.
std::vector<std::pair<std::string, std::string>> describe(const OptimizerConfig& config);

struct Evaluation {
  std::size_t index = 0;  // 1-based call count
  Point theta;
  double value = 0.0;
  double best_so_far = 0.0;
  double wall_seconds = 0.0;  // time spent inside the objective
};

struct EvalTrace {
  Algorithm algorithm = Algorithm::CORS;
  std::uint64_t seed = 0;
  std::vector<Evaluation> evaluations;
  std::vector<std::pair<std::string, std::string>> settings;
};

struct OptimizeResult {
  EvalTrace trace;
  Point best;
  double best_value = 0.0;
};

/// Minimises `f` over `bounds` from `start`. Returns the best point among all
/// evaluations. Throws BoundsError when start lies outside the box and
/// ConfigError for a budget below one.
OptimizeResult optimize(const OptimizerConfig& config, const Objective& f, const Bounds& bounds,
                        std::span<const double> start);

// ---------------------------------------------------------------------------
// Building blocks, exposed for testing. Points are in the unit cube.

Point clip_unit(Point x);
/// n points, one per stratum in every coordinate.
std::vector<Point> latin_hypercube(std::size_t n, std::size_t dim, Rng& rng);

struct CompassOptions {
  double initial_step = 0.1;
  double min_step = 1e-4;
  int max_evals = 500;
};
/// Coordinate pattern search in the unit cube minimising key(x)
/// lexicographically (first component, then second).
using LexKey = std::pair<double, double>;
Point compass_search(const std::function<LexKey(const Point&)>& key, Point x0, const CompassOptions& options);

// GA
std::pair<Point, Point> blend_crossover(const Point& a, const Point& b, double alpha, Rng& rng);
void gaussian_mutation(Point& x, double sigma, double gene_prob, Rng& rng);
std::size_t tournament_select(std::span<const double> fitness, int size, Rng& rng);
/// Crossover and mutation of already selected parents, clipped to the cube.
std::vector<Point> ga_vary(std::vector<Point> parents, const GaSettings& s, Rng& rng);

// SA
double sa_temperature(double initial, double visiting, int iteration);
double sa_acceptance_probability(double delta, double temperature_step, double acceptance);
class SaVisiting {
 public:
  explicit SaVisiting(double visiting);
  /// Heavy-tailed step of `dim` components at a temperature.
  std::vector<double> sample(double temperature, std::size_t dim, Rng& rng) const;
  /// Candidate near x: all coordinates when step < dim, else coordinate
  /// step - dim only. Wraps into [0,1).
  Point propose(const Point& x, std::size_t step, double temperature, Rng& rng) const;

 private:
  double qv_;
  double factor4_p_;
  double factor6_;
};

// Nelder-Mead
struct Simplex {
  std::vector<Point> vertices;
  std::vector<double> values;
};
enum class NmMove { Reflect, Expand, ContractOutside, ContractInside, Shrink };
/// centroid + t * (centroid - worst)
Point nm_affine(const Point& centroid, const Point& worst, double t);
double simplex_diameter(const Simplex& s);
/// One iteration on a simplex with evaluated vertices.
NmMove nm_iteration(Simplex& s, const std::function<double(const Point&)>& f, const NmsaSettings& settings);

// MADS
double halton(std::uint64_t index, std::uint32_t base);
/// n+1 unit directions: the columns of a Householder reflection built from
/// the Halton vector with the given index, plus their negated sum.
std::vector<Point> ortho_directions(std::size_t n, std::uint64_t halton_index);

// SPSA
struct SpsaGains {
  double a, c, alpha, gamma, stability;
  double step(int k) const;
  double perturbation(int k) const;
};
/// Two-sided simultaneous-perturbation gradient estimate at x with
/// perturbation size c along the sign vector delta.
Point spsa_gradient(const std::function<double(const Point&)>& f, const Point& x, double c,
                    std::span<const double> delta);

// BYO
class GaussianProcess {
 public:
  GaussianProcess(std::size_t dim, double jitter);
  /// Fits to points and raw values (standardised internally).
  void fit(const std::vector<Point>& x, std::span<const double> y);
  /// Marginal-likelihood ascent over length scales and signal variance.
  void optimize_hyperparameters(int iterations = 60);
  double log_marginal_likelihood() const;
  /// Posterior mean and standard deviation in the units of y.
  std::pair<double, double> predict(const Point& x) const;
  std::span<const double> length_scales() const { return length_; }

 private:
  void factorize();

  std::size_t dim_;
  double jitter_;
  std::vector<double> length_;
  double signal_ = 1.0;
  kernels::PointSet x_{0};
  Eigen::VectorXd y_;  // standardised
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double lml_ = 0.0;
};
/// Expected improvement below `best` for a Gaussian prediction.
double expected_improvement(double mean, double sd, double best, double xi);

// CORS
class CubicRbf {
 public:
  /// Interpolant sum_i w_i |x - x_i|^3 + c0 + c.x through the data.
  void fit(const std::vector<Point>& x, std::span<const double> y);
  double operator()(const Point& x) const;

 private:
  std::size_t dim_ = 0;
  kernels::PointSet centers_{0};
  std::vector<double> weights_;
  std::vector<double> tail_;
};

}  // namespace railcal::optim
