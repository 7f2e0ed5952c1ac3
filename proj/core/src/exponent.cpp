#include <algorithm>
#include <stdexcept>

#include "pdp/paradigm_cluster.hpp"
#include "pdp/utf8.hpp"

namespace pdp {

std::size_t Exponent::length() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.text.size();
  return n;
}

std::string Exponent::key() const {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (i) out += '|';
    if (s.word_start) out += '<';
    out += utf8::encode(s.text);
    if (s.word_end) out += '>';
    if (!s.word_start && !s.word_end) out += '@' + std::to_string(s.gap);
  }
  return out;
}

std::string Exponent::display() const {
  std::string out = "(";
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (i) out += ", ";
    if (s.word_start) out += '<';
    out += utf8::encode(s.text);
    if (s.word_end) out += '>';
  }
  return out + ")";
}

std::string BaseExponent::base_utf8() const { return utf8::encode(base); }

std::u32string lcs_pair(std::u32string_view a, std::u32string_view b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::uint32_t> dp((n + 1) * (m + 1), 0);
  const auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return dp[i * (m + 1) + j]; };
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = a[i - 1] == b[j - 1] ? at(i - 1, j - 1) + 1 : std::max(at(i - 1, j), at(i, j - 1));

  std::u32string out;
  out.reserve(at(n, m));
  std::size_t i = n, j = m;
  while (i > 0 && j > 0) {
    if (a[i - 1] == b[j - 1]) {
      out.push_back(a[i - 1]);
      --i;
      --j;
    } else if (at(i - 1, j) >= at(i, j - 1)) {
      --i;
    } else {
      --j;
    }
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string lcs_pair(std::string_view a, std::string_view b) {
  return utf8::encode(lcs_pair(std::u32string_view(utf8::decode(a)), std::u32string_view(utf8::decode(b))));
}

Exponent exponent_of(std::u32string_view form, std::u32string_view base) {
  Exponent x;
  std::size_t j = 0;
  for (std::size_t i = 0; i < form.size(); ++i) {
    if (j < base.size() && form[i] == base[j]) {
      ++j;
      continue;
    }
    const int gap = static_cast<int>(j);
    if (x.segments.empty() || x.segments.back().gap != gap || x.segments.back().word_end) {
      x.segments.push_back({{}, gap, i == 0, false});
    }
    x.segments.back().text.push_back(form[i]);
    if (i + 1 == form.size()) x.segments.back().word_end = true;
  }
  if (j != base.size()) throw std::invalid_argument("exponent_of: base is not a subsequence of the form");
  return x;
}

BaseExponent base(std::span<const std::string> forms) {
  if (forms.empty()) throw std::invalid_argument("base: no forms");
  std::vector<std::u32string> decoded;
  decoded.reserve(forms.size());
  for (const auto& f : forms) decoded.push_back(utf8::decode(f));

  std::vector<std::size_t> order(forms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return decoded[a].size() != decoded[b].size() ? decoded[a].size() < decoded[b].size() : forms[a] < forms[b];
  });

  BaseExponent result;
  result.base = decoded[order.front()];
  for (std::size_t k = 1; k < order.size() && !result.base.empty(); ++k)
    result.base = lcs_pair(result.base, decoded[order[k]]);
  result.exponents.reserve(forms.size());
  for (const auto& f : decoded) result.exponents.push_back(exponent_of(f, result.base));
  return result;
}

}  // namespace pdp
