#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "storesim/store_layout.hpp"

namespace storesim::basket {

// One customer's basket. Under the "a customer = basket" identification a
// customer id appears once; repeated ids are unioned at ingest.
struct Transaction {
  std::string customer;
  std::vector<std::string> products;
};

// Binary product x customer incidence matrix. Rows follow the sorted store
// catalog, columns the sorted customer ids, so construction order never
// changes the result.
class BasketMatrix {
 public:
  BasketMatrix() = default;
  BasketMatrix(std::vector<std::string> products,
               std::vector<std::string> customers,
               std::vector<std::uint8_t> cells);

  const std::vector<std::string>& products() const { return products_; }
  const std::vector<std::string>& customers() const { return customers_; }
  std::size_t product_count() const { return products_.size(); }
  std::size_t customer_count() const { return customers_.size(); }

  std::uint8_t at(std::size_t product, std::size_t customer) const {
    return cells_[product * customers_.size() + customer];
  }
  // Customer j's basket as a binary vector over the catalog.
  std::vector<std::uint8_t> column(std::size_t customer) const;
  std::size_t column_sum(std::size_t customer) const;

 private:
  std::vector<std::string> products_;
  std::vector<std::string> customers_;
  std::vector<std::uint8_t> cells_;  // row-major, products x customers
};

// Rows follow the catalog order; unknown products and empty baskets are
// rejected with ValidationError.
BasketMatrix build_matrix(std::span<const Transaction> transactions,
                          std::vector<std::string> catalog);

// Cosine similarity of two binary vectors; throws ValidationError on a zero
// vector. Result is in [0,1] because the inputs are non-negative.
double cosine(std::span<const std::uint8_t> u, std::span<const std::uint8_t> v);

// n x n cosine scores between customers; symmetric with exact unit diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  explicit SimilarityMatrix(const BasketMatrix& matrix);

  std::size_t size() const { return n_; }
  double at(std::size_t i, std::size_t j) const { return scores_[i * n_ + j]; }
  // Customer i's full score row, used as its clustering feature vector.
  std::span<const double> row(std::size_t i) const {
    return {scores_.data() + i * n_, n_};
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> scores_;
};

struct ClusterOptions {
  int k = 1;
  std::uint64_t seed = 1;
  int max_iter = 200;
  double tol = 1e-7;
  // Product joins a cluster archetype when its responsibility-weighted
  // presence among members reaches this fraction.
  double archetype_threshold = 0.5;
  // false: cluster on similarity-score rows; true: on raw binary columns.
  bool raw_features = false;
  double covariance_floor = 1e-6;
};

struct TrajectoryCluster {
  int id = 0;
  double weight = 0.0;          // fraction of customers (hard assignment)
  double mixture_weight = 0.0;  // fitted mixing proportion
  std::vector<std::string> member_customers;
  std::vector<std::string> archetype_products;
  std::vector<std::string> bay_sequence;  // filled by attach_bay_sequences
};

struct ClusterResult {
  std::vector<TrajectoryCluster> clusters;
  std::vector<double> log_likelihood;  // per-iteration trace, non-decreasing
  // responsibilities[j][c] = P(cluster c | customer j)
  std::vector<std::vector<double>> responsibilities;
  double bic = 0.0;
};

// EM fit of a diagonal-covariance Gaussian mixture over the customers'
// feature rows. Deterministic given (matrix, options).
ClusterResult cluster(const BasketMatrix& matrix, const ClusterOptions& options);

struct SelectKResult {
  int k = 0;
  std::vector<std::pair<int, double>> bic_table;  // (k, bic) per candidate
};

// Minimum-BIC k over the candidate list; ties break toward the smallest k.
SelectKResult select_k(const BasketMatrix& matrix, std::span<const int> k_range,
                       const ClusterOptions& base_options);

// Orders the bays holding `products` by a greedy nearest-neighbour walk from
// the layout's spawn node; route-length ties break on lexicographic bay id.
std::vector<std::string> to_bay_sequence(std::span<const std::string> products,
                                         const store::StoreLayout& layout);

// Fills every cluster's bay_sequence from its archetype products.
void attach_bay_sequences(ClusterResult& result,
                          const store::StoreLayout& layout);

// Reads CSV "customer_id,product_id" (one pair per line) or JSONL
// {"customer": ..., "products": [...]}; format detected from the content.
std::vector<Transaction> load_transactions(const std::string& path);

// Cluster report file: everything sim_engine needs to draw journeys, plus
// the full membership/BIC detail for analysis.
void write_cluster_report(const std::string& path, const ClusterResult& result,
                          const ClusterOptions& options,
                          std::span<const std::pair<int, double>> bic_table);

struct ClusterJourney {
  double weight = 0.0;
  std::vector<std::string> bay_sequence;
};

struct ClusterReport {
  int k = 0;
  std::uint64_t seed = 0;
  double bic = 0.0;
  std::vector<ClusterJourney> journeys;
};

ClusterReport load_cluster_report(const std::string& path);

}  // namespace storesim::basket
