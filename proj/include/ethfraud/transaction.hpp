#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ethfraud {

// Class labels used everywhere: fraud is the positive class.
inline constexpr int kNonFraud = 0;
inline constexpr int kFraud = 1;

// One normal (non-token) value transfer. The amount stays an exact decimal
// wei string until feature extraction converts it to floating ether.
struct Transaction {
  std::string tx_hash;
  std::int64_t timestamp = 0;  // Unix seconds, > 0
  std::string sender;          // lowercase 0x + 40 hex digits
  std::string recipient;       // may be empty for contract creation
  std::string value_wei;       // canonical decimal, >= 0
  std::uint64_t gas_price_wei = 0;
  std::uint64_t gas_limit = 0;
  bool is_error = false;

  bool operator==(const Transaction&) const = default;
};

using TxMap = std::map<std::string, std::vector<Transaction>>;

std::string to_lower_ascii(std::string s);
bool is_address(const std::string& s);
bool is_tx_hash(const std::string& s);
bool is_decimal_wei(const std::string& s);

// Exact decimal digits -> double ether (divides by 1e18).
double wei_to_ether(const std::string& wei);

inline double wei_to_gwei(std::uint64_t wei) { return static_cast<double>(wei) / 1e9; }

// address -> label. Insertion rejects conflicting relabeling; duplicate
// identical labels are idempotent.
class LabelSet {
 public:
  void insert(const std::string& address, int label);
  std::size_t size() const { return entries_.size(); }
  bool contains(const std::string& address) const { return entries_.count(address) != 0; }
  int label_of(const std::string& address) const;
  std::int64_t count(int label) const;
  const std::map<std::string, int>& entries() const { return entries_; }

 private:
  std::map<std::string, int> entries_;
};

}  // namespace ethfraud
