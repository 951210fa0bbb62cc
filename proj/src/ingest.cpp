#include "ethfraud/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <thread>
#include <unordered_set>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

#include "ethfraud/csv.hpp"
#include "ethfraud/errors.hpp"
#include "ethfraud/parallel.hpp"

namespace ethfraud {

RateLimiter::RateLimiter(double max_requests_per_second)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(1.0 / max_requests_per_second))),
      next_free_(std::chrono::steady_clock::now()) {
  if (max_requests_per_second <= 0) throw InputError("rate limit must be positive");
}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_free_);
    next_free_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

namespace {

void sort_by_time_then_hash(std::vector<Transaction>& txs) {
  std::sort(txs.begin(), txs.end(), [](const Transaction& a, const Transaction& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.tx_hash < b.tx_hash;
  });
}

std::uint64_t parse_u64(const std::string& s, const std::string& where, const char* field) {
  if (s.empty()) throw ParseError(where + ": empty " + field);
  std::uint64_t v = 0;
  for (const char c : s) {
    if (c < '0' || c > '9') throw ParseError(where + ": bad " + field + " '" + s + "'");
    const std::uint64_t d = static_cast<std::uint64_t>(c - '0');
    if (v > (UINT64_MAX - d) / 10) throw ParseError(where + ": " + field + " out of range");
    v = v * 10 + d;
  }
  return v;
}

// Etherscan serves numbers as JSON strings; accept both.
std::string json_as_string(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) throw RemoteError(std::string("response row missing field ") + field);
  const auto& v = j.at(field);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  throw RemoteError(std::string("unexpected type for field ") + field);
}

struct ParsedUrl {
  bool https = false;
  std::string host_port;
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  std::string rest;
  if (url.rfind("https://", 0) == 0) {
    out.https = true;
    rest = url.substr(8);
  } else if (url.rfind("http://", 0) == 0) {
    rest = url.substr(7);
  } else {
    throw InputError("base URL must start with http:// or https://: " + url);
  }
  const auto slash = rest.find('/');
  out.host_port = rest.substr(0, slash);
  out.path = slash == std::string::npos ? std::string("/") : rest.substr(slash);
  if (out.host_port.empty()) throw InputError("base URL has no host: " + url);
  return out;
}

}  // namespace

struct EtherscanClient::Impl {
  ClientConfig cfg;
  ParsedUrl url;
  RateLimiter limiter;

  Impl(ClientConfig c) : cfg(std::move(c)), url(parse_url(cfg.base_url)), limiter(cfg.max_requests_per_second) {}

  nlohmann::json get_json(const std::string& query) {
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
      }
      limiter.acquire();
      httplib::Result res;
      if (url.https) {
        httplib::SSLClient cli(url.host_port);
        cli.set_read_timeout(30, 0);
        res = cli.Get((url.path + query).c_str());
      } else {
        httplib::Client cli(url.host_port);
        cli.set_read_timeout(30, 0);
        res = cli.Get((url.path + query).c_str());
      }
      if (!res) {
        last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) {
        throw TransportError("HTTP " + std::to_string(res->status) + " from " + cfg.base_url);
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw RemoteError("unparseable response body: " + std::string(e.what()));
      }
    }
    throw TransportError("request failed after " + std::to_string(cfg.max_retries + 1) +
                         " attempts: " + last_error);
  }
};

EtherscanClient::EtherscanClient(ClientConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {}
EtherscanClient::~EtherscanClient() = default;

std::vector<Transaction> EtherscanClient::fetch_transactions(const std::string& raw_address) {
  const std::string address = to_lower_ascii(raw_address);
  if (!is_address(address)) throw InputError("malformed address: " + raw_address);

  std::vector<Transaction> out;
  std::unordered_set<std::string> seen;
  std::uint64_t startblock = 0;

  for (;;) {
    const std::string query = "?module=account&action=txlist&address=" + address +
                              "&startblock=" + std::to_string(startblock) +
                              "&endblock=99999999&page=1&offset=" + std::to_string(impl_->cfg.page_size) +
                              "&sort=asc&apikey=" + impl_->cfg.api_key;
    const nlohmann::json body = impl_->get_json(query);

    const std::string status = body.value("status", "");
    const std::string message = body.value("message", "");
    if (!body.contains("result")) throw RemoteError("response missing 'result'");
    const auto& result = body.at("result");

    if (status == "0") {
      if (message.find("No transactions found") != std::string::npos) break;
      std::string detail = result.is_string() ? result.get<std::string>() : result.dump();
      throw RemoteError("API error: " + message + ": " + detail);
    }
    if (!result.is_array()) throw RemoteError("'result' is not an array");

    std::uint64_t max_block = startblock;
    std::size_t page_rows = 0;
    bool saw_block_number = false;
    for (const auto& row : result) {
      ++page_rows;
      Transaction tx;
      tx.tx_hash = to_lower_ascii(json_as_string(row, "hash"));
      tx.timestamp = static_cast<std::int64_t>(
          parse_u64(json_as_string(row, "timeStamp"), "response", "timeStamp"));
      tx.sender = to_lower_ascii(json_as_string(row, "from"));
      tx.recipient = to_lower_ascii(json_as_string(row, "to"));
      tx.value_wei = json_as_string(row, "value");
      tx.gas_price_wei = parse_u64(json_as_string(row, "gasPrice"), "response", "gasPrice");
      tx.gas_limit = parse_u64(json_as_string(row, "gas"), "response", "gas");
      tx.is_error = json_as_string(row, "isError") != "0";
      if (!is_tx_hash(tx.tx_hash)) throw RemoteError("bad tx hash in response: " + tx.tx_hash);
      if (!is_address(tx.sender)) throw RemoteError("bad sender in response: " + tx.sender);
      if (!tx.recipient.empty() && !is_address(tx.recipient)) {
        throw RemoteError("bad recipient in response: " + tx.recipient);
      }
      if (!is_decimal_wei(tx.value_wei)) throw RemoteError("bad value in response: " + tx.value_wei);
      if (tx.timestamp <= 0) throw RemoteError("bad timestamp in response");

      if (row.contains("blockNumber")) {
        saw_block_number = true;
        max_block = std::max(max_block, parse_u64(json_as_string(row, "blockNumber"), "response",
                                                  "blockNumber"));
      }
      if (seen.insert(tx.tx_hash).second) out.push_back(std::move(tx));
    }

    if (page_rows < static_cast<std::size_t>(impl_->cfg.page_size)) break;
    if (!saw_block_number) {
      throw RemoteError("cannot paginate: full page without blockNumber fields");
    }
    // Re-fetch from the last block seen; the overlap is removed by hash dedup.
    startblock = max_block;
  }

  sort_by_time_then_hash(out);
  return out;
}

std::vector<Transaction> fetch_many(const std::vector<std::string>& addresses,
                                    const ClientConfig& cfg, int threads) {
  EtherscanClient client(cfg);
  std::vector<std::vector<Transaction>> per_address(addresses.size());
  parallel_for(addresses.size(), threads,
               [&](std::size_t i) { per_address[i] = client.fetch_transactions(addresses[i]); });

  std::vector<Transaction> out;
  std::unordered_set<std::string> seen;
  for (auto& list : per_address) {
    for (auto& tx : list) {
      if (seen.insert(tx.tx_hash).second) out.push_back(std::move(tx));
    }
  }
  sort_by_time_then_hash(out);
  return out;
}

Transaction parse_transaction_row(const std::vector<std::string>& f, const std::string& where) {
  Transaction tx;
  tx.tx_hash = to_lower_ascii(f[0]);
  if (!is_tx_hash(tx.tx_hash)) throw ParseError(where + ": malformed tx hash '" + f[0] + "'");

  std::uint64_t ts = parse_u64(f[1], where, "timestamp");
  if (ts == 0) throw ParseError(where + ": timestamp must be positive");
  tx.timestamp = static_cast<std::int64_t>(ts);

  tx.sender = to_lower_ascii(f[2]);
  if (!is_address(tx.sender)) throw ParseError(where + ": malformed sender '" + f[2] + "'");
  tx.recipient = to_lower_ascii(f[3]);
  if (!tx.recipient.empty() && !is_address(tx.recipient)) {
    throw ParseError(where + ": malformed recipient '" + f[3] + "'");
  }

  if (!is_decimal_wei(f[4])) throw ParseError(where + ": malformed value_wei '" + f[4] + "'");
  tx.value_wei = f[4];
  tx.gas_price_wei = parse_u64(f[5], where, "gas_price_wei");
  tx.gas_limit = parse_u64(f[6], where, "gas_limit");

  if (f[7] == "0") {
    tx.is_error = false;
  } else if (f[7] == "1") {
    tx.is_error = true;
  } else {
    throw ParseError(where + ": is_error must be 0 or 1, got '" + f[7] + "'");
  }
  return tx;
}

TxMap load_transactions_file(const std::string& path) {
  const auto rows = read_csv_rows(path, kTxCsvHeader);
  TxMap map;
  std::size_t line_no = 1;
  for (const auto& fields : rows) {
    ++line_no;
    const std::string where = path + ": line " + std::to_string(line_no);
    Transaction tx = parse_transaction_row(fields, where);
    map[tx.sender].push_back(tx);
    if (!tx.recipient.empty() && tx.recipient != tx.sender) {
      map[tx.recipient].push_back(tx);
    }
  }
  for (auto& [addr, txs] : map) {
    (void)addr;
    sort_by_time_then_hash(txs);
  }
  return map;
}

void write_transactions_file(const std::string& path, const std::vector<Transaction>& txs) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << kTxCsvHeader << '\n';
  for (const auto& tx : txs) {
    out << tx.tx_hash << ',' << tx.timestamp << ',' << tx.sender << ',' << tx.recipient << ','
        << tx.value_wei << ',' << tx.gas_price_wei << ',' << tx.gas_limit << ','
        << (tx.is_error ? '1' : '0') << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

LabelSet load_labels(const std::string& path) {
  const auto rows = read_csv_rows(path, kLabelCsvHeader);
  LabelSet labels;
  std::size_t line_no = 1;
  for (const auto& fields : rows) {
    ++line_no;
    const std::string where = path + ": line " + std::to_string(line_no);
    const std::string address = to_lower_ascii(fields[0]);
    if (!is_address(address)) throw ParseError(where + ": malformed address '" + fields[0] + "'");
    int label;
    if (fields[1] == "fraud") {
      label = kFraud;
    } else if (fields[1] == "nonfraud") {
      label = kNonFraud;
    } else {
      throw ParseError(where + ": label must be fraud or nonfraud, got '" + fields[1] + "'");
    }
    try {
      labels.insert(address, label);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return labels;
}

void write_labels_file(const std::string& path, const LabelSet& labels) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path);
  out << kLabelCsvHeader << '\n';
  for (const auto& [address, label] : labels.entries()) {
    out << address << ',' << (label == kFraud ? "fraud" : "nonfraud") << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace ethfraud
