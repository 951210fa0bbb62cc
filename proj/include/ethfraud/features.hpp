#pragma once

#include <array>
#include <string>
#include <vector>

#include "ethfraud/dataset.hpp"
#include "ethfraud/transaction.hpp"

namespace ethfraud {

// Canonical feature order; every dataset produced by this module uses it.
inline const std::array<const char*, 13> kFeatureNames = {
    "IT", "OT", "UIT", "UOT", "AVIT", "AVOT", "VIT",
    "VOT", "ATIT", "ATOT", "AGP", "AGL", "DUR"};

// The 13 per-account transaction aggregates.
// Counts are stored as doubles so the vector maps directly onto a matrix row.
struct FeatureVector {
  double it = 0;    // incoming transaction count
  double ot = 0;    // outgoing transaction count
  double uit = 0;   // distinct incoming counterparties
  double uot = 0;   // distinct outgoing counterparties
  double avit = 0;  // mean incoming value, ether
  double avot = 0;  // mean outgoing value, ether
  double vit = 0;   // total incoming value, ether
  double vot = 0;   // total outgoing value, ether
  double atit = 0;  // mean gap between incoming transactions, seconds
  double atot = 0;  // mean gap between outgoing transactions, seconds
  double agp = 0;   // mean gas price, gwei
  double agl = 0;   // mean gas limit, gas units
  double dur = 0;   // first-to-last transaction span, days

  std::array<double, 13> as_array() const {
    return {it, ot, uit, uot, avit, avot, vit, vot, atit, atot, agp, agl, dur};
  }
};

// Aggregates one account's history. Preconditions: txs sorted ascending by
// timestamp, every transaction involves `address`, failed transactions
// already filtered out, txs non-empty. Self-transfers count in both
// directions. Accumulation order is canonicalized internally, so any
// permutation of equal-timestamp input rows yields bit-identical output.
FeatureVector extract_features(const std::string& address, const std::vector<Transaction>& txs);

struct SkipEntry {
  std::string address;
  std::string reason;
};

struct FeatureTable {
  Dataset dataset;
  std::vector<SkipEntry> skipped;  // labeled accounts without usable transactions
};

// One row per labeled address with at least one non-failed transaction, in
// sorted-address order. Failed transactions are dropped before aggregation.
FeatureTable build_feature_table(const TxMap& txs, const LabelSet& labels, int threads = 0);

}  // namespace ethfraud
