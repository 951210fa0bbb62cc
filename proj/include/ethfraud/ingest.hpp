#pragma once

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ethfraud/transaction.hpp"

namespace ethfraud {

struct ClientConfig {
  std::string base_url;  // e.g. https://api.etherscan.io/api
  std::string api_key;   // taken from ETHERSCAN_API_KEY, never from files
  double max_requests_per_second = 5.0;
  int page_size = 10000;
  int max_retries = 3;
};

// Shared token source. acquire() blocks until the next request slot is free;
// safe to call from any number of fetch threads.
class RateLimiter {
 public:
  explicit RateLimiter(double max_requests_per_second);
  void acquire();

 private:
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_free_;
  std::mutex mu_;
};

// Etherscan-compatible account/txlist client. Pagination walks ascending block
// order; overlapping pages are deduplicated by tx hash, first occurrence kept.
class EtherscanClient {
 public:
  explicit EtherscanClient(ClientConfig cfg);
  ~EtherscanClient();

  // All normal transactions touching `address`, ascending by timestamp.
  std::vector<Transaction> fetch_transactions(const std::string& address);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Fetches several accounts, possibly concurrently, against one shared limiter.
// Returns the union of all fetched transactions, deduplicated by hash.
std::vector<Transaction> fetch_many(const std::vector<std::string>& addresses,
                                    const ClientConfig& cfg, int threads);

inline constexpr char kTxCsvHeader[] =
    "tx_hash,timestamp,from,to,value_wei,gas_price_wei,gas_limit,is_error";
inline constexpr char kLabelCsvHeader[] = "address,label";

// One entry per distinct address appearing as sender or recipient; each list
// sorted ascending by (timestamp, tx_hash).
TxMap load_transactions_file(const std::string& path);

void write_transactions_file(const std::string& path, const std::vector<Transaction>& txs);

LabelSet load_labels(const std::string& path);
void write_labels_file(const std::string& path, const LabelSet& labels);

// Parses one CSV row (without header) into a Transaction; `where` prefixes
// error messages, e.g. "file.csv: line 7".
Transaction parse_transaction_row(const std::vector<std::string>& fields, const std::string& where);

}  // namespace ethfraud
