// Copyright 2026 The Speaker Sense Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "speaker_sense/metrics.h"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "http_client.h"
#include "speaker_sense/errors.h"
#include "utf8.h"

namespace speaker_sense {
namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// Tokens never contain '\x1f', so it separates n-gram members unambiguously.
NgramCounts CountNgrams(std::span<const std::string> tokens, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      key += '\x1f';
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

std::size_t ClippedOverlap(const NgramCounts& candidate,
                           const NgramCounts& reference) {
  std::size_t overlap = 0;
  for (const auto& [gram, count] : candidate) {
    auto it = reference.find(gram);
    if (it != reference.end()) overlap += std::min(count, it->second);
  }
  return overlap;
}

double F1(double precision, double recall) {
  if (precision + recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::size_t LcsLength(std::span<const std::string> a,
                      std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = (a[i - 1] == b[j - 1]) ? prev[j - 1] + 1
                                      : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Porter stemmer, following the structure of the reference C implementation.
class PorterStemmer {
 public:
  explicit PorterStemmer(std::string word) : b_(std::move(word)) {
    k_ = static_cast<int>(b_.size()) - 1;
  }

  std::string Run() {
    if (k_ <= 1) return b_;
    Step1ab();
    if (k_ > 0) {
      Step1c();
      Step2();
      Step3();
      Step4();
      Step5();
    }
    return b_.substr(0, static_cast<std::size_t>(k_ + 1));
  }

 private:
  bool Cons(int i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !Cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b[0..j].
  int M() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!Cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (Cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!Cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool VowelInStem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!Cons(i)) return true;
    }
    return false;
  }

  bool DoubleC(int j) const {
    if (j < 1) return false;
    if (b_[j] != b_[j - 1]) return false;
    return Cons(j);
  }

  bool Cvc(int i) const {
    if (i < 2 || !Cons(i) || Cons(i - 1) || !Cons(i - 2)) return false;
    const char ch = b_[i];
    return !(ch == 'w' || ch == 'x' || ch == 'y');
  }

  bool Ends(std::string_view s) {
    const int len = static_cast<int>(s.size());
    if (len > k_ + 1) return false;
    if (b_.compare(static_cast<std::size_t>(k_ - len + 1),
                   static_cast<std::size_t>(len), s) != 0) {
      return false;
    }
    j_ = k_ - len;
    return true;
  }

  void SetTo(std::string_view s) {
    b_.replace(static_cast<std::size_t>(j_ + 1),
               static_cast<std::size_t>(k_ - j_), s);
    k_ = j_ + static_cast<int>(s.size());
    b_.resize(static_cast<std::size_t>(k_ + 1));
  }

  void R(std::string_view s) {
    if (M() > 0) SetTo(s);
  }

  void Step1ab() {
    if (b_[k_] == 's') {
      if (Ends("sses")) {
        k_ -= 2;
      } else if (Ends("ies")) {
        SetTo("i");
      } else if (b_[k_ - 1] != 's') {
        --k_;
      }
      b_.resize(static_cast<std::size_t>(k_ + 1));
    }
    if (Ends("eed")) {
      if (M() > 0) --k_;
    } else if ((Ends("ed") || Ends("ing")) && VowelInStem()) {
      k_ = j_;
      b_.resize(static_cast<std::size_t>(k_ + 1));
      if (Ends("at")) {
        SetTo("ate");
      } else if (Ends("bl")) {
        SetTo("ble");
      } else if (Ends("iz")) {
        SetTo("ize");
      } else if (DoubleC(k_)) {
        --k_;
        const char ch = b_[k_];
        if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
      } else if (M() == 1 && Cvc(k_)) {
        SetTo("e");
      }
    }
    b_.resize(static_cast<std::size_t>(k_ + 1));
  }

  void Step1c() {
    if (Ends("y") && VowelInStem()) b_[k_] = 'i';
  }

  void Step2() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("ational")) { R("ate"); break; }
        if (Ends("tional")) { R("tion"); break; }
        break;
      case 'c':
        if (Ends("enci")) { R("ence"); break; }
        if (Ends("anci")) { R("ance"); break; }
        break;
      case 'e':
        if (Ends("izer")) { R("ize"); break; }
        break;
      case 'l':
        if (Ends("bli")) { R("ble"); break; }
        if (Ends("alli")) { R("al"); break; }
        if (Ends("entli")) { R("ent"); break; }
        if (Ends("eli")) { R("e"); break; }
        if (Ends("ousli")) { R("ous"); break; }
        break;
      case 'o':
        if (Ends("ization")) { R("ize"); break; }
        if (Ends("ation")) { R("ate"); break; }
        if (Ends("ator")) { R("ate"); break; }
        break;
      case 's':
        if (Ends("alism")) { R("al"); break; }
        if (Ends("iveness")) { R("ive"); break; }
        if (Ends("fulness")) { R("ful"); break; }
        if (Ends("ousness")) { R("ous"); break; }
        break;
      case 't':
        if (Ends("aliti")) { R("al"); break; }
        if (Ends("iviti")) { R("ive"); break; }
        if (Ends("biliti")) { R("ble"); break; }
        break;
      case 'g':
        if (Ends("logi")) { R("log"); break; }
        break;
      default:
        break;
    }
  }

  void Step3() {
    switch (b_[k_]) {
      case 'e':
        if (Ends("icate")) { R("ic"); break; }
        if (Ends("ative")) { R(""); break; }
        if (Ends("alize")) { R("al"); break; }
        break;
      case 'i':
        if (Ends("iciti")) { R("ic"); break; }
        break;
      case 'l':
        if (Ends("ical")) { R("ic"); break; }
        if (Ends("ful")) { R(""); break; }
        break;
      case 's':
        if (Ends("ness")) { R(""); break; }
        break;
      default:
        break;
    }
  }

  void Step4() {
    if (k_ < 1) return;
    switch (b_[k_ - 1]) {
      case 'a':
        if (Ends("al")) break;
        return;
      case 'c':
        if (Ends("ance")) break;
        if (Ends("ence")) break;
        return;
      case 'e':
        if (Ends("er")) break;
        return;
      case 'i':
        if (Ends("ic")) break;
        return;
      case 'l':
        if (Ends("able")) break;
        if (Ends("ible")) break;
        return;
      case 'n':
        if (Ends("ant")) break;
        if (Ends("ement")) break;
        if (Ends("ment")) break;
        if (Ends("ent")) break;
        return;
      case 'o':
        if (Ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
        if (Ends("ou")) break;
        return;
      case 's':
        if (Ends("ism")) break;
        return;
      case 't':
        if (Ends("ate")) break;
        if (Ends("iti")) break;
        return;
      case 'u':
        if (Ends("ous")) break;
        return;
      case 'v':
        if (Ends("ive")) break;
        return;
      case 'z':
        if (Ends("ize")) break;
        return;
      default:
        return;
    }
    if (M() > 1) {
      k_ = j_;
      b_.resize(static_cast<std::size_t>(k_ + 1));
    }
  }

  void Step5() {
    j_ = k_;
    if (b_[k_] == 'e') {
      const int a = M();
      if (a > 1 || (a == 1 && !Cvc(k_ - 1))) --k_;
    }
    if (b_[k_] == 'l' && DoubleC(k_) && M() > 1) --k_;
    b_.resize(static_cast<std::size_t>(k_ + 1));
  }

  std::string b_;
  int k_ = 0;
  int j_ = 0;
};

class RougeN final : public Metric {
 public:
  RougeN(std::size_t n, TokenizerConfig config)
      : n_(n), config_(config), id_("rouge" + std::to_string(n)) {}
  const std::string& id() const override { return id_; }
  bool symmetric() const override { return true; }
  double score(std::string_view candidate,
               std::string_view reference) const override {
    return rouge_n_f1(candidate, reference, n_, config_);
  }

 private:
  std::size_t n_;
  TokenizerConfig config_;
  std::string id_;
};

class RougeL final : public Metric {
 public:
  explicit RougeL(TokenizerConfig config) : config_(config) {}
  const std::string& id() const override { return id_; }
  bool symmetric() const override { return true; }
  double score(std::string_view candidate,
               std::string_view reference) const override {
    return rouge_l_f1(candidate, reference, config_);
  }

 private:
  TokenizerConfig config_;
  std::string id_ = "rougeL";
};

class Bleu final : public Metric {
 public:
  explicit Bleu(TokenizerConfig config) : config_(config) {}
  const std::string& id() const override { return id_; }
  bool symmetric() const override { return false; }
  double score(std::string_view candidate,
               std::string_view reference) const override {
    return bleu(candidate, reference, 4, config_);
  }

 private:
  TokenizerConfig config_;
  std::string id_ = "bleu";
};

class External final : public Metric {
 public:
  External(std::string id, std::shared_ptr<ExternalScorer> scorer)
      : id_(std::move(id)), scorer_(std::move(scorer)) {}
  const std::string& id() const override { return id_; }
  // Model-based scorers are not assumed symmetric.
  bool symmetric() const override { return false; }
  double score(std::string_view candidate,
               std::string_view reference) const override {
    return scorer_->score(candidate, reference);
  }

 private:
  std::string id_;
  std::shared_ptr<ExternalScorer> scorer_;
};

}  // namespace

TokenSeq tokenize(std::string_view text, const TokenizerConfig& config) {
  TokenSeq tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    const char32_t cp = internal::DecodeUtf8(text, i, &len);
    i += len;
    if (internal::IsWordCodePoint(cp)) {
      internal::AppendUtf8(internal::ToLowerCodePoint(cp), &current);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  if (config.stem) {
    for (auto& t : tokens) {
      if (t.size() > 3) t = porter_stem(t);
    }
  }
  return tokens;
}

std::string porter_stem(std::string_view word) {
  for (char c : word) {
    if (c < 'a' || c > 'z') return std::string(word);
  }
  return PorterStemmer(std::string(word)).Run();
}

double rouge_n_f1(std::span<const std::string> candidate,
                  std::span<const std::string> reference, std::size_t n) {
  if (n == 0) throw InvalidArgument("rouge_n_f1: n must be >= 1");
  if (candidate.size() < n || reference.size() < n) return 0.0;
  const auto cand = CountNgrams(candidate, n);
  const auto ref = CountNgrams(reference, n);
  const double overlap = static_cast<double>(ClippedOverlap(cand, ref));
  const double precision =
      overlap / static_cast<double>(candidate.size() - n + 1);
  const double recall = overlap / static_cast<double>(reference.size() - n + 1);
  return F1(precision, recall);
}

double rouge_n_f1(std::string_view candidate, std::string_view reference,
                  std::size_t n, const TokenizerConfig& config) {
  return rouge_n_f1(tokenize(candidate, config), tokenize(reference, config),
                    n);
}

double rouge_l_f1(std::span<const std::string> candidate,
                  std::span<const std::string> reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const double lcs = static_cast<double>(LcsLength(candidate, reference));
  const double precision = lcs / static_cast<double>(candidate.size());
  const double recall = lcs / static_cast<double>(reference.size());
  return F1(precision, recall);
}

double rouge_l_f1(std::string_view candidate, std::string_view reference,
                  const TokenizerConfig& config) {
  return rouge_l_f1(tokenize(candidate, config), tokenize(reference, config));
}

double bleu(std::span<const std::string> candidate,
            std::span<const std::string> reference, std::size_t max_order) {
  if (max_order == 0) throw InvalidArgument("bleu: max_order must be >= 1");
  if (candidate.empty() || reference.empty()) return 0.0;
  const std::size_t orders = std::min(max_order, candidate.size());
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= orders; ++n) {
    const auto cand = CountNgrams(candidate, n);
    const auto ref = CountNgrams(reference, n);
    const double total = static_cast<double>(candidate.size() - n + 1);
    const std::size_t matches = ClippedOverlap(cand, ref);
    const double precision = matches > 0
                                 ? static_cast<double>(matches) / total
                                 : 1.0 / (2.0 * total);
    log_sum += std::log(precision);
  }
  const double geo_mean = std::exp(log_sum / static_cast<double>(orders));
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return brevity * geo_mean;
}

double bleu(std::string_view candidate, std::string_view reference,
            std::size_t max_order, const TokenizerConfig& config) {
  return bleu(tokenize(candidate, config), tokenize(reference, config),
              max_order);
}

ExternalScorer::ExternalScorer(std::string endpoint, std::string scorer_id,
                               RetryPolicy retry)
    : endpoint_(std::move(endpoint)),
      scorer_id_(std::move(scorer_id)),
      retry_(retry) {
  internal::ParseEndpoint(endpoint_);
}

double ExternalScorer::score(std::string_view candidate,
                             std::string_view reference) {
  auto key = std::make_tuple(std::string(candidate), std::string(reference));
  {
    std::shared_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }

  nlohmann::json body;
  body["scorer"] = scorer_id_;
  body["candidate"] = std::get<0>(key);
  body["reference"] = std::get<1>(key);
  {
    std::unique_lock lock(mu_);
    ++requests_;
  }
  const auto reply = internal::PostJson(internal::ParseEndpoint(endpoint_),
                                        "/score", body, retry_);
  auto it = reply.find("score");
  if (!reply.is_object() || it == reply.end() || !it->is_number()) {
    throw ProtocolError("scorer '" + scorer_id_ +
                        "' returned a reply without a numeric \"score\"");
  }
  const double raw = it->get<double>();
  if (!std::isfinite(raw)) {
    throw ProtocolError("scorer '" + scorer_id_ + "' returned a non-finite score");
  }
  const double value = std::clamp(raw, 0.0, 1.0);

  std::unique_lock lock(mu_);
  cache_.emplace(std::move(key), value);
  return value;
}

std::size_t ExternalScorer::cache_size() const {
  std::shared_lock lock(mu_);
  return cache_.size();
}

std::size_t ExternalScorer::requests_sent() const {
  std::shared_lock lock(mu_);
  return requests_;
}

double external_score(std::string_view candidate, std::string_view reference,
                      ExternalScorer& scorer) {
  return scorer.score(candidate, reference);
}

std::unique_ptr<Metric> make_metric(std::string_view name,
                                    const TokenizerConfig& config,
                                    const std::string& scorer_endpoint) {
  if (name == "rougeL") return std::make_unique<RougeL>(config);
  if (name == "bleu") return std::make_unique<Bleu>(config);
  if (name.size() == 6 && name.starts_with("rouge") && name[5] >= '1' &&
      name[5] <= '4') {
    return std::make_unique<RougeN>(static_cast<std::size_t>(name[5] - '0'),
                                    config);
  }
  if (name.starts_with("external:") && name.size() > 9) {
    if (scorer_endpoint.empty()) {
      throw InvalidArgument("metric '" + std::string(name) +
                            "' needs a scorer endpoint");
    }
    auto scorer = std::make_shared<ExternalScorer>(
        scorer_endpoint, std::string(name.substr(9)));
    return std::make_unique<External>(std::string(name), std::move(scorer));
  }
  throw InvalidArgument("unknown metric '" + std::string(name) +
                        "' (expected rouge1..rouge4, rougeL, bleu or "
                        "external:<id>)");
}

std::vector<std::string> default_metric_names() {
  return {"rouge2", "rougeL", "bleu"};
}

}  // namespace speaker_sense
