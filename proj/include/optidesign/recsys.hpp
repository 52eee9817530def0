#pragma once

// Cold-start recommender pipeline. Each movie is an experiment whose
// observation row A_e holds the ratings of that movie by the training users,
// so theta (one weight per training user) expresses a new user's tastes as a
// combination of the training users. A design is the set of movies the new
// user is asked to rate.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optidesign/greedy.hpp"

namespace optidesign {

struct RatingsTable {
  std::vector<std::int64_t> users;   // ascending
  std::vector<std::int64_t> movies;  // ascending
  /// users x movies, NaN where the user did not rate the movie.
  Matrix ratings;
  /// Genre per movie (same order as `movies`); empty strings when absent.
  std::vector<std::string> genres;

  bool has_genres() const;
  std::size_t user_index(std::int64_t user) const;
  std::size_t movie_index(std::int64_t movie) const;
  bool rated(std::size_t u, std::size_t m) const;
};

/// CSV with header `user,movie,rating` or `user,movie,rating,genre`. Throws
/// ParseError naming the line on malformed rows, duplicate (user, movie)
/// pairs or conflicting genres.
RatingsTable parse_ratings(std::istream& in);
RatingsTable load_ratings(const std::string& path);
void save_ratings(const RatingsTable& table, const std::string& path);

enum class Impute { zero, mean };
Impute parse_impute(const std::string& s);

struct RecsysPoolOptions {
  double noise_var = 1.0;
  double prior_var = 100.0;
  Impute impute = Impute::zero;
};

/// One scalar experiment per movie (id = movie id), p = |training_users|,
/// R_e = noise_var, R_theta = prior_var I, H = I, theta_bar = 0. Throws
/// EmptyTraining when there are no training users or a movie has no training
/// rating.
Pool build_recsys_pool(const RatingsTable& table, const std::vector<std::int64_t>& training_users,
                       const RecsysPoolOptions& opts = {});

struct RecsysEvaluation {
  double mae = 0.0;
  std::optional<double> genre_error_rate;
  std::size_t predictions = 0;
  std::size_t users = 0;
};

/// For every test user: estimate theta from the designed movies the user
/// actually rated (a movie contributes one observation however often it
/// occurs in the design), predict A_f theta_hat for the user's other rated
/// movies and accumulate absolute errors. MAE is pooled over all evaluated
/// (user, movie) entries. The genre of a user is the genre with the highest
/// mean rating over those entries, ties to the lexicographically smallest
/// name; the error rate compares predicted against true ratings.
RecsysEvaluation evaluate_recsys(const Pool& pool, const RatingsTable& table,
                                 const std::vector<std::int64_t>& test_users, const Design& design);

struct LowRankSpec {
  int users = 140;
  int movies = 200;
  int rank = 3;
  double noise_sd = 0.5;
  /// Probability that an entry is observed.
  double density = 1.0;
  int genres = 3;
  double offset = 3.0;
  std::uint64_t seed = 0;
};

/// Ratings offset + U V^T + noise with U, V standard Gaussian (scaled by
/// 1/sqrt(rank)). Each movie is labelled "g<j>" for the largest of its first
/// `genres` factor loadings (`genres` <= rank; 0 disables labels). Every
/// movie keeps at least one observed rating.
RatingsTable synth_ratings(const LowRankSpec& spec);

struct UserSplit {
  std::vector<std::int64_t> training;
  std::vector<std::int64_t> test;
};

/// Random disjoint split of the table's users.
UserSplit split_users(const RatingsTable& table, int n_training, int n_test, std::uint64_t seed);

/// k distinct experiments chosen uniformly at random.
Design random_subset(const Pool& pool, int k, std::uint64_t seed);

struct RecsysComparison {
  RecsysEvaluation greedy;
  RecsysEvaluation random;
  GreedyTrace trace;
};

/// Greedy A-design (without replacement) against a uniformly random set of
/// k movies on the same split.
RecsysComparison compare_recsys(const RatingsTable& table, const UserSplit& split, int k,
                                std::uint64_t seed, const RecsysPoolOptions& opts = {},
                                Execution exec = Execution::parallel);

}  // namespace optidesign
