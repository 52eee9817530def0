#include "optidesign/recsys.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "optidesign/errors.hpp"
#include "optidesign/pool_io.hpp"

namespace optidesign {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_number(std::string_view field, std::size_t line_no, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" +
                     std::string(field) + "'");
  }
  return value;
}

std::size_t index_in(const std::vector<std::int64_t>& sorted, std::int64_t id, const char* what) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
  if (it == sorted.end() || *it != id) {
    throw InvalidArgument(std::string("unknown ") + what + " " + std::to_string(id));
  }
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

bool RatingsTable::has_genres() const {
  return std::any_of(genres.begin(), genres.end(), [](const std::string& g) { return !g.empty(); });
}

std::size_t RatingsTable::user_index(std::int64_t user) const { return index_in(users, user, "user"); }
std::size_t RatingsTable::movie_index(std::int64_t movie) const { return index_in(movies, movie, "movie"); }

bool RatingsTable::rated(std::size_t u, std::size_t m) const {
  return !std::isnan(ratings(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(m)));
}

RatingsTable parse_ratings(std::istream& in) {
  struct Row {
    std::int64_t user, movie;
    double rating;
  };
  std::string line;
  std::size_t line_no = 0;
  bool with_genre = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto header = split_fields(line);
    const bool base = header.size() >= 3 && header[0] == "user" && header[1] == "movie" &&
                      header[2] == "rating";
    if (!base || header.size() > 4 || (header.size() == 4 && header[3] != "genre")) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected header user,movie,rating[,genre]");
    }
    with_genre = header.size() == 4;
    break;
  }
  if (line_no == 0) throw ParseError("line 1: empty ratings file");

  std::vector<Row> rows;
  std::map<std::int64_t, std::string> genre_of;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != (with_genre ? 4u : 3u)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(with_genre ? 4 : 3) + " fields, got " + std::to_string(f.size()));
    }
    Row r{parse_number<std::int64_t>(f[0], line_no, "user id"),
          parse_number<std::int64_t>(f[1], line_no, "movie id"),
          parse_number<double>(f[2], line_no, "rating")};
    if (!std::isfinite(r.rating)) throw ParseError("line " + std::to_string(line_no) + ": rating not finite");
    if (with_genre) {
      const std::string g(f[3]);
      const auto [it, inserted] = genre_of.emplace(r.movie, g);
      if (!inserted && it->second != g) {
        throw ParseError("line " + std::to_string(line_no) + ": movie " + std::to_string(r.movie) +
                         " has conflicting genres '" + it->second + "' and '" + g + "'");
      }
    }
    rows.push_back(r);
  }

  RatingsTable t;
  for (const Row& r : rows) {
    t.users.push_back(r.user);
    t.movies.push_back(r.movie);
  }
  for (auto* ids : {&t.users, &t.movies}) {
    std::sort(ids->begin(), ids->end());
    ids->erase(std::unique(ids->begin(), ids->end()), ids->end());
  }
  t.ratings = Matrix::Constant(static_cast<Eigen::Index>(t.users.size()),
                               static_cast<Eigen::Index>(t.movies.size()), kMissing);
  // Line numbers for duplicate detection: data rows start after the header.
  std::size_t row_line = 0;
  for (const Row& r : rows) {
    ++row_line;
    const auto u = static_cast<Eigen::Index>(t.user_index(r.user));
    const auto m = static_cast<Eigen::Index>(t.movie_index(r.movie));
    if (!std::isnan(t.ratings(u, m))) {
      throw ParseError("data row " + std::to_string(row_line) + ": duplicate rating for user " +
                       std::to_string(r.user) + ", movie " + std::to_string(r.movie));
    }
    t.ratings(u, m) = r.rating;
  }
  t.genres.assign(t.movies.size(), "");
  for (const auto& [movie, g] : genre_of) t.genres[t.movie_index(movie)] = g;
  return t;
}

RatingsTable load_ratings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ratings file " + path);
  return parse_ratings(in);
}

void save_ratings(const RatingsTable& table, const std::string& path) {
  std::ostringstream out;
  out.precision(17);
  const bool genres = table.has_genres();
  out << (genres ? "user,movie,rating,genre\n" : "user,movie,rating\n");
  for (std::size_t u = 0; u < table.users.size(); ++u) {
    for (std::size_t m = 0; m < table.movies.size(); ++m) {
      if (!table.rated(u, m)) continue;
      out << table.users[u] << ',' << table.movies[m] << ','
          << table.ratings(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(m));
      if (genres) out << ',' << table.genres[m];
      out << '\n';
    }
  }
  write_file_atomic(path, out.str());
}

Impute parse_impute(const std::string& s) {
  if (s == "zero") return Impute::zero;
  if (s == "mean") return Impute::mean;
  throw InvalidArgument("impute must be 'zero' or 'mean', got '" + s + "'");
}

Pool build_recsys_pool(const RatingsTable& table, const std::vector<std::int64_t>& training_users,
                       const RecsysPoolOptions& opts) {
  if (training_users.empty()) throw EmptyTraining("no training users");
  std::vector<Eigen::Index> rows;
  rows.reserve(training_users.size());
  for (std::int64_t u : training_users) rows.push_back(static_cast<Eigen::Index>(table.user_index(u)));
  const auto p = static_cast<Eigen::Index>(rows.size());
  const Matrix r = Matrix::Constant(1, 1, opts.noise_var);

  std::vector<Experiment> experiments;
  experiments.reserve(table.movies.size());
  for (std::size_t m = 0; m < table.movies.size(); ++m) {
    const auto col = static_cast<Eigen::Index>(m);
    Matrix a(1, p);
    double sum = 0.0;
    int seen = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double v = table.ratings(rows[static_cast<std::size_t>(j)], col);
      a(0, j) = v;
      if (!std::isnan(v)) {
        sum += v;
        ++seen;
      }
    }
    if (seen == 0) {
      throw EmptyTraining("movie " + std::to_string(table.movies[m]) + " has no training rating");
    }
    const double fill = opts.impute == Impute::zero ? 0.0 : sum / seen;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (std::isnan(a(0, j))) a(0, j) = fill;
    }
    experiments.push_back(make_experiment(table.movies[m], a, r));
  }
  return Pool(std::move(experiments), Vector::Zero(p), opts.prior_var * Matrix::Identity(p, p),
              Matrix::Identity(p, p));
}

namespace {

// Genre with the largest mean, ties to the smallest name (std::map order).
std::string top_genre(const std::map<std::string, std::pair<double, int>>& acc) {
  std::string best;
  double best_mean = -std::numeric_limits<double>::infinity();
  for (const auto& [g, sc] : acc) {
    const double mean = sc.first / sc.second;
    if (mean > best_mean) {
      best_mean = mean;
      best = g;
    }
  }
  return best;
}

}  // namespace

RecsysEvaluation evaluate_recsys(const Pool& pool, const RatingsTable& table,
                                 const std::vector<std::int64_t>& test_users, const Design& design) {
  validate_design(pool, design);
  const bool genres = table.has_genres();
  double abs_sum = 0.0;
  std::size_t n_pred = 0, genre_users = 0, genre_wrong = 0;
  for (std::int64_t user : test_users) {
    const auto u = static_cast<Eigen::Index>(table.user_index(user));
    Design asked;
    Observations obs;
    for (const auto& [movie, count] : design.counts()) {
      const auto m = static_cast<Eigen::Index>(table.movie_index(movie));
      if (std::isnan(table.ratings(u, m))) continue;
      asked.add(movie);
      obs[movie] = {Vector::Constant(1, table.ratings(u, m))};
    }
    const Vector theta = estimate(pool, asked, obs).z_hat;

    std::map<std::string, std::pair<double, int>> pred_by_genre, true_by_genre;
    for (std::size_t mi = 0; mi < table.movies.size(); ++mi) {
      const auto m = static_cast<Eigen::Index>(mi);
      const std::int64_t movie = table.movies[mi];
      if (std::isnan(table.ratings(u, m)) || asked.count(movie) > 0 || !pool.contains(movie)) continue;
      const double truth = table.ratings(u, m);
      const double pred = (pool.experiment(movie).A() * theta)(0);
      abs_sum += std::abs(pred - truth);
      ++n_pred;
      if (genres && !table.genres[mi].empty()) {
        auto& pg = pred_by_genre[table.genres[mi]];
        pg.first += pred;
        ++pg.second;
        auto& tg = true_by_genre[table.genres[mi]];
        tg.first += truth;
        ++tg.second;
      }
    }
    if (!pred_by_genre.empty()) {
      ++genre_users;
      if (top_genre(pred_by_genre) != top_genre(true_by_genre)) ++genre_wrong;
    }
  }
  if (n_pred == 0) throw InvalidArgument("no held-out test ratings to evaluate");
  RecsysEvaluation ev;
  ev.mae = abs_sum / static_cast<double>(n_pred);
  ev.predictions = n_pred;
  ev.users = test_users.size();
  if (genre_users > 0) ev.genre_error_rate = static_cast<double>(genre_wrong) / static_cast<double>(genre_users);
  return ev;
}

RatingsTable synth_ratings(const LowRankSpec& spec) {
  if (spec.users <= 0 || spec.movies <= 0 || spec.rank <= 0) {
    throw InvalidArgument("low-rank spec needs users, movies, rank > 0");
  }
  if (spec.genres < 0 || spec.genres > spec.rank) throw InvalidArgument("genres must be in [0, rank]");
  if (!(spec.density > 0.0 && spec.density <= 1.0)) throw InvalidArgument("density must be in (0, 1]");
  if (!(spec.noise_sd >= 0.0)) throw InvalidArgument("noise_sd must be >= 0");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution observed(spec.density);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.rank));
  Matrix uf(spec.users, spec.rank), vf(spec.movies, spec.rank);
  for (Eigen::Index i = 0; i < uf.size(); ++i) uf.data()[i] = normal(rng);
  for (Eigen::Index i = 0; i < vf.size(); ++i) vf.data()[i] = normal(rng);

  RatingsTable t;
  t.users.resize(static_cast<std::size_t>(spec.users));
  t.movies.resize(static_cast<std::size_t>(spec.movies));
  std::iota(t.users.begin(), t.users.end(), 0);
  std::iota(t.movies.begin(), t.movies.end(), 0);
  t.ratings = Matrix::Constant(spec.users, spec.movies, kMissing);
  for (Eigen::Index m = 0; m < spec.movies; ++m) {
    bool any = false;
    for (Eigen::Index u = 0; u < spec.users; ++u) {
      const double clean = spec.offset + scale * uf.row(u).dot(vf.row(m));
      const double noise = spec.noise_sd > 0.0 ? spec.noise_sd * normal(rng) : 0.0;
      if (observed(rng)) {
        t.ratings(u, m) = clean + noise;
        any = true;
      }
    }
    if (!any) {
      const Eigen::Index u = m % spec.users;
      t.ratings(u, m) = spec.offset + scale * uf.row(u).dot(vf.row(m));
    }
  }
  t.genres.assign(t.movies.size(), "");
  if (spec.genres > 0) {
    for (Eigen::Index m = 0; m < spec.movies; ++m) {
      Eigen::Index best = 0;
      vf.row(m).head(spec.genres).maxCoeff(&best);
      t.genres[static_cast<std::size_t>(m)] = "g" + std::to_string(best);
    }
  }
  return t;
}

UserSplit split_users(const RatingsTable& table, int n_training, int n_test, std::uint64_t seed) {
  if (n_training < 1 || n_test < 1 ||
      static_cast<std::size_t>(n_training) + static_cast<std::size_t>(n_test) > table.users.size()) {
    throw InvalidArgument("split needs 1 <= training, 1 <= test, training + test <= users");
  }
  std::vector<std::int64_t> ids = table.users;
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  UserSplit s;
  s.training.assign(ids.begin(), ids.begin() + n_training);
  s.test.assign(ids.begin() + n_training, ids.begin() + n_training + n_test);
  std::sort(s.training.begin(), s.training.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

Design random_subset(const Pool& pool, int k, std::uint64_t seed) {
  if (k < 0) throw InvalidArgument("k must be >= 0");
  if (static_cast<std::size_t>(k) > pool.size()) {
    throw PoolExhausted("cannot pick " + std::to_string(k) + " distinct experiments from " +
                        std::to_string(pool.size()));
  }
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  Design d;
  for (int i = 0; i < k; ++i) d.add(pool.at(idx[static_cast<std::size_t>(i)]).id());
  return d;
}

RecsysComparison compare_recsys(const RatingsTable& table, const UserSplit& split, int k,
                                std::uint64_t seed, const RecsysPoolOptions& opts, Execution exec) {
  const Pool pool = build_recsys_pool(table, split.training, opts);
  RecsysComparison out;
  out.trace = greedy_design(pool, Criterion::A, k, /*with_replacement=*/false, exec);
  out.greedy = evaluate_recsys(pool, table, split.test, out.trace.final_design);
  out.random = evaluate_recsys(pool, table, split.test, random_subset(pool, k, seed));
  return out;
}

}  // namespace optidesign
