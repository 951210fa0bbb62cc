#include "ethfraud/transaction.hpp"

#include "ethfraud/errors.hpp"

namespace ethfraud {

std::string to_lower_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

namespace {

bool is_hex_digits(const std::string& s, std::size_t from, std::size_t count) {
  if (s.size() != from + count) return false;
  for (std::size_t i = from; i < s.size(); ++i) {
    const char c = s[i];
    const bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool is_address(const std::string& s) {
  return s.size() == 42 && s[0] == '0' && s[1] == 'x' && is_hex_digits(s, 2, 40);
}

bool is_tx_hash(const std::string& s) {
  return s.size() == 66 && s[0] == '0' && s[1] == 'x' && is_hex_digits(s, 2, 64);
}

bool is_decimal_wei(const std::string& s) {
  if (s.empty()) return false;
  if (s.size() > 1 && s[0] == '0') return false;  // canonical form, no leading zeros
  for (const char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

double wei_to_ether(const std::string& wei) {
  double v = 0.0;
  for (const char c : wei) v = v * 10.0 + static_cast<double>(c - '0');
  return v / 1e18;
}

void LabelSet::insert(const std::string& address, int label) {
  auto [it, inserted] = entries_.emplace(address, label);
  if (!inserted && it->second != label) {
    throw ParseError("conflicting labels for address " + address);
  }
}

int LabelSet::label_of(const std::string& address) const {
  const auto it = entries_.find(address);
  if (it == entries_.end()) throw InputError("address not in label set: " + address);
  return it->second;
}

std::int64_t LabelSet::count(int label) const {
  std::int64_t n = 0;
  for (const auto& [addr, l] : entries_) {
    (void)addr;
    if (l == label) ++n;
  }
  return n;
}

}  // namespace ethfraud
