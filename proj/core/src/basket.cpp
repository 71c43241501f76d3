#include "storesim/basket.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "storesim/errors.hpp"
#include "storesim/rng.hpp"

namespace storesim::basket {

namespace {
using nlohmann::json;
}

BasketMatrix::BasketMatrix(std::vector<std::string> products,
                           std::vector<std::string> customers,
                           std::vector<std::uint8_t> cells)
    : products_(std::move(products)),
      customers_(std::move(customers)),
      cells_(std::move(cells)) {
  if (cells_.size() != products_.size() * customers_.size()) {
    throw ValidationError("BasketMatrix: cell count does not match id lists");
  }
}

std::vector<std::uint8_t> BasketMatrix::column(std::size_t customer) const {
  std::vector<std::uint8_t> col(products_.size());
  for (std::size_t i = 0; i < products_.size(); ++i) {
    col[i] = at(i, customer);
  }
  return col;
}

std::size_t BasketMatrix::column_sum(std::size_t customer) const {
  std::size_t sum = 0;
  for (std::size_t i = 0; i < products_.size(); ++i) {
    sum += at(i, customer);
  }
  return sum;
}

BasketMatrix build_matrix(std::span<const Transaction> transactions,
                          std::vector<std::string> catalog) {
  std::sort(catalog.begin(), catalog.end());
  catalog.erase(std::unique(catalog.begin(), catalog.end()), catalog.end());
  std::map<std::string, std::size_t> product_index;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    product_index.emplace(catalog[i], i);
  }

  // Union per customer so a repeated id stays one basket.
  std::map<std::string, std::set<std::string>> baskets;
  for (const auto& t : transactions) {
    auto& basket = baskets[t.customer];
    for (const auto& p : t.products) {
      if (!product_index.count(p)) {
        throw ValidationError("build_matrix: unknown product id: " + p);
      }
      basket.insert(p);
    }
  }
  for (const auto& [customer, basket] : baskets) {
    if (basket.empty()) {
      throw ValidationError("build_matrix: empty basket for customer: " +
                            customer);
    }
  }

  std::vector<std::string> customers;
  customers.reserve(baskets.size());
  for (const auto& [customer, basket] : baskets) {
    customers.push_back(customer);  // std::map iterates sorted
  }

  std::vector<std::uint8_t> cells(catalog.size() * customers.size(), 0);
  for (std::size_t j = 0; j < customers.size(); ++j) {
    for (const auto& p : baskets[customers[j]]) {
      cells[product_index[p] * customers.size() + j] = 1;
    }
  }
  return BasketMatrix(std::move(catalog), std::move(customers),
                      std::move(cells));
}

double cosine(std::span<const std::uint8_t> u,
              std::span<const std::uint8_t> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine: dimension mismatch");
  }
  std::size_t dot = 0;
  std::size_t nu = 0;
  std::size_t nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += static_cast<std::size_t>(u[i]) * v[i];
    nu += u[i];
    nv += v[i];
  }
  if (nu == 0 || nv == 0) {
    throw ValidationError("cosine: zero vector");
  }
  return static_cast<double>(dot) /
         (std::sqrt(static_cast<double>(nu)) * std::sqrt(static_cast<double>(nv)));
}

SimilarityMatrix::SimilarityMatrix(const BasketMatrix& matrix)
    : n_(matrix.customer_count()), scores_(n_ * n_, 0.0) {
  std::vector<std::vector<std::uint8_t>> cols(n_);
  for (std::size_t j = 0; j < n_; ++j) {
    cols[j] = matrix.column(j);
  }
  for (std::size_t i = 0; i < n_; ++i) {
    scores_[i * n_ + i] = 1.0;  // exact unit diagonal by construction
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double s = cosine(cols[i], cols[j]);
      scores_[i * n_ + j] = s;
      scores_[j * n_ + i] = s;
    }
  }
}

namespace {

// Customer feature rows for the mixture fit: similarity-score rows by
// default, raw binary basket columns in raw mode.
std::vector<std::vector<double>> feature_rows(const BasketMatrix& matrix,
                                              bool raw) {
  const std::size_t n = matrix.customer_count();
  std::vector<std::vector<double>> rows(n);
  if (raw) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto col = matrix.column(j);
      rows[j].assign(col.begin(), col.end());
    }
  } else {
    SimilarityMatrix sim(matrix);
    for (std::size_t j = 0; j < n; ++j) {
      const auto row = sim.row(j);
      rows[j].assign(row.begin(), row.end());
    }
  }
  return rows;
}

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

// Farthest-first center selection. The first pick minimizes a seeded hash of
// the customer id (not its column index), so a permuted input yields the
// same centers; later picks maximize distance to the chosen set with
// customer-id tie-breaks.
std::vector<std::size_t> farthest_first(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::string>& ids, int k, std::uint64_t seed) {
  const std::size_t n = rows.size();
  std::size_t first = 0;
  std::uint64_t best_hash = std::numeric_limits<std::uint64_t>::max();
  for (std::size_t j = 0; j < n; ++j) {
    std::uint64_t h = seed ^ fnv1a64(ids[j]);
    h = splitmix64(h);
    if (h < best_hash || (h == best_hash && ids[j] < ids[first])) {
      best_hash = h;
      first = j;
    }
  }

  std::vector<std::size_t> centers{first};
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  while (centers.size() < static_cast<std::size_t>(k)) {
    for (std::size_t j = 0; j < n; ++j) {
      min_d[j] = std::min(min_d[j], sq_dist(rows[j], rows[centers.back()]));
    }
    std::size_t pick = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (min_d[j] > best ||
          (min_d[j] == best && ids[j] < ids[pick])) {
        best = min_d[j];
        pick = j;
      }
    }
    centers.push_back(pick);
  }
  return centers;
}

}  // namespace

ClusterResult cluster(const BasketMatrix& matrix,
                      const ClusterOptions& options) {
  const std::size_t n = matrix.customer_count();
  const int k = options.k;
  if (k < 1) {
    throw ValidationError("cluster: k must be at least 1");
  }
  if (static_cast<std::size_t>(k) > n) {
    throw ValidationError("cluster: k exceeds customer count");
  }
  if (options.max_iter < 1) {
    throw ValidationError("cluster: max_iter must be at least 1");
  }

  const auto rows = feature_rows(matrix, options.raw_features);
  const std::size_t d = rows.front().size();
  const auto& ids = matrix.customers();

  // Broad initialization: centers from farthest-first, every component
  // starting at the global per-dimension variance. Starting broad keeps the
  // E-step responsibilities spread out, which steers EM toward balanced
  // optima instead of single-point collapses.
  std::vector<double> global_mean(d, 0.0);
  for (const auto& row : rows) {
    for (std::size_t dd = 0; dd < d; ++dd) {
      global_mean[dd] += row[dd];
    }
  }
  for (auto& m : global_mean) {
    m /= static_cast<double>(n);
  }
  std::vector<double> global_var(d, 0.0);
  for (const auto& row : rows) {
    for (std::size_t dd = 0; dd < d; ++dd) {
      const double diff = row[dd] - global_mean[dd];
      global_var[dd] += diff * diff;
    }
  }
  for (auto& v : global_var) {
    v = std::max(v / static_cast<double>(n), options.covariance_floor);
  }

  const auto centers = farthest_first(rows, ids, k, options.seed);
  std::vector<std::vector<double>> means(k);
  std::vector<std::vector<double>> vars(k, global_var);
  std::vector<double> weights(k, 1.0 / k);
  for (int c = 0; c < k; ++c) {
    means[c] = rows[centers[c]];
  }

  std::vector<std::vector<double>> resp(n, std::vector<double>(k, 0.0));
  std::vector<double> ll_trace;
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < options.max_iter; ++iter) {
    // E-step in log space.
    double ll = 0.0;
    std::vector<double> log_p(k);
    for (std::size_t j = 0; j < n; ++j) {
      for (int c = 0; c < k; ++c) {
        double lp = std::log(std::max(weights[c], 1e-300));
        for (std::size_t dd = 0; dd < d; ++dd) {
          const double var = vars[c][dd];
          const double diff = rows[j][dd] - means[c][dd];
          lp += -0.5 * std::log(2.0 * M_PI * var) - diff * diff / (2.0 * var);
        }
        log_p[c] = lp;
      }
      const double mx = *std::max_element(log_p.begin(), log_p.end());
      double sum = 0.0;
      for (int c = 0; c < k; ++c) {
        sum += std::exp(log_p[c] - mx);
      }
      const double lse = mx + std::log(sum);
      ll += lse;
      for (int c = 0; c < k; ++c) {
        resp[j][c] = std::exp(log_p[c] - lse);
      }
    }
    ll_trace.push_back(ll);

    // M-step.
    for (int c = 0; c < k; ++c) {
      double nc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        nc += resp[j][c];
      }
      weights[c] = nc / static_cast<double>(n);
      const double denom = std::max(nc, 1e-12);
      for (std::size_t dd = 0; dd < d; ++dd) {
        double m = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          m += resp[j][c] * rows[j][dd];
        }
        means[c][dd] = m / denom;
      }
      for (std::size_t dd = 0; dd < d; ++dd) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double diff = rows[j][dd] - means[c][dd];
          v += resp[j][c] * diff * diff;
        }
        vars[c][dd] = std::max(v / denom, options.covariance_floor);
      }
    }

    if (iter > 0 && ll - prev_ll < options.tol) {
      break;
    }
    prev_ll = ll;
  }

  ClusterResult result;
  result.log_likelihood = ll_trace;
  result.responsibilities = resp;

  // Hard assignment by max responsibility; ties take the lowest cluster id.
  std::vector<int> assignment(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (resp[j][c] > resp[j][best]) {
        best = c;
      }
    }
    assignment[j] = best;
  }

  result.clusters.resize(k);
  for (int c = 0; c < k; ++c) {
    auto& cl = result.clusters[c];
    cl.id = c;
    cl.mixture_weight = weights[c];
    for (std::size_t j = 0; j < n; ++j) {
      if (assignment[j] == c) {
        cl.member_customers.push_back(ids[j]);
      }
    }
    cl.weight = static_cast<double>(cl.member_customers.size()) /
                static_cast<double>(n);

    // Responsibility-weighted product frequency against the threshold.
    double resp_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      resp_total += resp[j][c];
    }
    if (resp_total > 0.0) {
      for (std::size_t p = 0; p < matrix.product_count(); ++p) {
        double freq = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          freq += resp[j][c] * matrix.at(p, j);
        }
        if (freq / resp_total >= options.archetype_threshold) {
          cl.archetype_products.push_back(matrix.products()[p]);
        }
      }
    }
  }

  // BIC with (k-1) free mixing weights plus mean and variance per dimension.
  const double params =
      static_cast<double>(k - 1) + 2.0 * static_cast<double>(k) * static_cast<double>(d);
  result.bic = -2.0 * ll_trace.back() + params * std::log(static_cast<double>(n));
  return result;
}

SelectKResult select_k(const BasketMatrix& matrix, std::span<const int> k_range,
                       const ClusterOptions& base_options) {
  if (k_range.empty()) {
    throw ValidationError("select_k: empty k range");
  }
  std::vector<int> candidates(k_range.begin(), k_range.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  SelectKResult out;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int k : candidates) {
    ClusterOptions options = base_options;
    options.k = k;
    const ClusterResult r = cluster(matrix, options);
    out.bic_table.emplace_back(k, r.bic);
    if (r.bic < best_bic) {  // strict: ties keep the earlier (smaller) k
      best_bic = r.bic;
      out.k = k;
    }
  }
  return out;
}

std::vector<std::string> to_bay_sequence(std::span<const std::string> products,
                                         const store::StoreLayout& layout) {
  std::set<std::string> bay_set;
  for (const auto& p : products) {
    const store::Bay* bay = layout.bay_of_product(p);
    if (bay == nullptr) {
      throw ValidationError("to_bay_sequence: product without a bay: " + p);
    }
    bay_set.insert(bay->id);
  }

  std::vector<std::string> remaining(bay_set.begin(), bay_set.end());
  std::vector<std::string> sequence;
  std::string current = layout.spawn;
  while (!remaining.empty()) {
    std::size_t pick = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      const store::Bay* bay = layout.find_bay(remaining[i]);
      const double len = store::route(layout, current, bay->node).length;
      // remaining is sorted, so on an exact tie the first (lexicographically
      // smallest) bay id wins.
      if (len < best) {
        best = len;
        pick = i;
      }
    }
    sequence.push_back(remaining[pick]);
    current = layout.find_bay(remaining[pick])->node;
    remaining.erase(remaining.begin() + pick);
  }
  return sequence;
}

void attach_bay_sequences(ClusterResult& result,
                          const store::StoreLayout& layout) {
  for (auto& cl : result.clusters) {
    cl.bay_sequence = to_bay_sequence(cl.archetype_products, layout);
  }
}

std::vector<Transaction> load_transactions(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("transactions not found: " + path);
  }
  std::string first_line;
  std::streampos start = in.tellg();
  while (std::getline(in, first_line)) {
    const auto pos = first_line.find_first_not_of(" \t\r");
    if (pos != std::string::npos) {
      first_line = first_line.substr(pos);
      break;
    }
    start = in.tellg();
  }
  in.clear();
  in.seekg(start);

  std::vector<Transaction> out;
  std::string line;
  if (!first_line.empty() && first_line.front() == '{') {
    // JSONL form.
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) {
        continue;
      }
      json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.is_object() || !rec.contains("customer") ||
          !rec.contains("products") || !rec["products"].is_array()) {
        throw ParseError("transactions: bad record at line " +
                         std::to_string(line_no));
      }
      Transaction t;
      t.customer = rec["customer"].get<std::string>();
      for (const auto& p : rec["products"]) {
        t.products.push_back(p.get<std::string>());
      }
      out.push_back(std::move(t));
    }
  } else {
    // CSV form: customer_id,product_id per line.
    std::map<std::string, std::vector<std::string>> grouped;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (line.find_first_not_of(" \t") == std::string::npos) {
        continue;
      }
      const auto comma = line.find(',');
      if (comma == std::string::npos || comma == 0 ||
          comma + 1 == line.size()) {
        throw ParseError("transactions: bad CSV at line " +
                         std::to_string(line_no));
      }
      grouped[line.substr(0, comma)].push_back(line.substr(comma + 1));
    }
    for (auto& [customer, products] : grouped) {
      out.push_back(Transaction{customer, std::move(products)});
    }
  }
  return out;
}

void write_cluster_report(const std::string& path, const ClusterResult& result,
                          const ClusterOptions& options,
                          std::span<const std::pair<int, double>> bic_table) {
  json doc;
  doc["k"] = result.clusters.size();
  doc["seed"] = options.seed;
  doc["bic"] = result.bic;
  doc["log_likelihood"] = result.log_likelihood.back();
  doc["iterations"] = result.log_likelihood.size();
  json table = json::array();
  for (const auto& [k, bic] : bic_table) {
    table.push_back({{"k", k}, {"bic", bic}});
  }
  doc["bic_table"] = std::move(table);
  json clusters = json::array();
  for (const auto& cl : result.clusters) {
    clusters.push_back({{"id", cl.id},
                        {"weight", cl.weight},
                        {"mixture_weight", cl.mixture_weight},
                        {"members", cl.member_customers},
                        {"archetype_products", cl.archetype_products},
                        {"bay_sequence", cl.bay_sequence}});
  }
  doc["clusters"] = std::move(clusters);

  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw ParseError("cannot write cluster report: " + path);
  }
  out << doc.dump(2) << "\n";
}

ClusterReport load_cluster_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cluster report not found: " + path);
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("clusters")) {
    throw ParseError("cluster report: malformed JSON: " + path);
  }
  ClusterReport report;
  report.k = doc.value("k", 0);
  report.seed = doc.value("seed", std::uint64_t{0});
  report.bic = doc.value("bic", 0.0);
  for (const auto& cl : doc["clusters"]) {
    ClusterJourney j;
    j.weight = cl.value("weight", 0.0);
    for (const auto& b : cl.at("bay_sequence")) {
      j.bay_sequence.push_back(b.get<std::string>());
    }
    report.journeys.push_back(std::move(j));
  }
  return report;
}

}  // namespace storesim::basket
