#include "ethfraud/features.hpp"

#include <algorithm>
#include <set>

#include "ethfraud/errors.hpp"
#include "ethfraud/parallel.hpp"

namespace ethfraud {

FeatureVector extract_features(const std::string& address, const std::vector<Transaction>& txs) {
  if (txs.empty()) {
    throw InputError("account " + address + " has no usable transactions");
  }

  // Canonical processing order: (timestamp, hash). Input must already be
  // time-sorted; the hash tie-break makes sums independent of input order.
  std::vector<const Transaction*> ordered;
  ordered.reserve(txs.size());
  for (std::size_t i = 0; i < txs.size(); ++i) {
    if (i > 0 && txs[i].timestamp < txs[i - 1].timestamp) {
      throw InputError("transactions for " + address + " are not sorted by timestamp");
    }
    if (txs[i].is_error) {
      throw InputError("failed transaction passed to feature extraction for " + address);
    }
    if (txs[i].sender != address && txs[i].recipient != address) {
      throw InputError("transaction " + txs[i].tx_hash + " does not involve " + address);
    }
    ordered.push_back(&txs[i]);
  }
  std::sort(ordered.begin(), ordered.end(), [](const Transaction* a, const Transaction* b) {
    if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
    return a->tx_hash < b->tx_hash;
  });

  FeatureVector f;
  std::set<std::string> in_peers, out_peers;
  std::vector<std::int64_t> in_times, out_times;
  double gas_price_sum = 0, gas_limit_sum = 0;

  for (const Transaction* tx : ordered) {
    if (tx->recipient == address) {
      f.it += 1;
      f.vit += wei_to_ether(tx->value_wei);
      in_peers.insert(tx->sender);
      in_times.push_back(tx->timestamp);
    }
    if (tx->sender == address) {
      f.ot += 1;
      f.vot += wei_to_ether(tx->value_wei);
      // Contract creations have no counterparty address.
      if (!tx->recipient.empty()) out_peers.insert(tx->recipient);
      out_times.push_back(tx->timestamp);
    }
    gas_price_sum += wei_to_gwei(tx->gas_price_wei);
    gas_limit_sum += static_cast<double>(tx->gas_limit);
  }

  f.uit = static_cast<double>(in_peers.size());
  f.uot = static_cast<double>(out_peers.size());
  f.avit = f.it > 0 ? f.vit / f.it : 0.0;
  f.avot = f.ot > 0 ? f.vot / f.ot : 0.0;

  auto mean_gap = [](const std::vector<std::int64_t>& times) {
    if (times.size() < 2) return 0.0;
    double sum = 0;
    for (std::size_t i = 1; i < times.size(); ++i) {
      sum += static_cast<double>(times[i] - times[i - 1]);
    }
    return sum / static_cast<double>(times.size() - 1);
  };
  f.atit = mean_gap(in_times);
  f.atot = mean_gap(out_times);

  const double n = static_cast<double>(ordered.size());
  f.agp = gas_price_sum / n;
  f.agl = gas_limit_sum / n;
  f.dur = static_cast<double>(ordered.back()->timestamp - ordered.front()->timestamp) / 86400.0;
  return f;
}

FeatureTable build_feature_table(const TxMap& txs, const LabelSet& labels, int threads) {
  // Sorted-address order comes from the ordered label map.
  std::vector<const std::string*> addresses;
  std::vector<int> label_values;
  addresses.reserve(labels.size());
  for (const auto& [address, label] : labels.entries()) {
    addresses.push_back(&address);
    label_values.push_back(label);
  }

  struct RowResult {
    bool ok = false;
    std::string reason;
    FeatureVector fv;
  };
  std::vector<RowResult> results(addresses.size());

  parallel_for(addresses.size(), threads, [&](std::size_t i) {
    const std::string& address = *addresses[i];
    auto it = txs.find(address);
    if (it == txs.end()) {
      results[i].reason = "no transactions";
      return;
    }
    std::vector<Transaction> usable;
    usable.reserve(it->second.size());
    for (const auto& tx : it->second) {
      if (!tx.is_error) usable.push_back(tx);
    }
    if (usable.empty()) {
      results[i].reason = "only failed transactions";
      return;
    }
    results[i].fv = extract_features(address, usable);
    results[i].ok = true;
  });

  FeatureTable out;
  out.dataset.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
  std::size_t kept = 0;
  for (const auto& r : results) {
    if (r.ok) ++kept;
  }
  out.dataset.features.resize(static_cast<Eigen::Index>(kept), 13);
  out.dataset.addresses.reserve(kept);
  out.dataset.labels.reserve(kept);

  Eigen::Index row = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i].ok) {
      out.skipped.push_back({*addresses[i], results[i].reason});
      continue;
    }
    out.dataset.addresses.push_back(*addresses[i]);
    out.dataset.labels.push_back(label_values[i]);
    const auto arr = results[i].fv.as_array();
    for (Eigen::Index j = 0; j < 13; ++j) {
      out.dataset.features(row, j) = arr[static_cast<std::size_t>(j)];
    }
    ++row;
  }
  return out;
}

}  // namespace ethfraud
