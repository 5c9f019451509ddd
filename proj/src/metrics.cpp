#include "commitforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

#include "commitforge/text.hpp"

namespace commitforge::metrics {

namespace {

std::vector<std::string> metric_tokens(const std::string& s) {
    return text::tokenize(text::to_lower(s));
}

} // namespace

std::pair<ConfusionMatrix, ClassificationReport>
classification_report(const std::vector<ccs::CommitType>& gold,
                      const std::vector<ccs::CommitType>& pred) {
    if (gold.size() != pred.size())
        throw std::invalid_argument("classification_report: length mismatch");
    if (gold.empty()) throw std::invalid_argument("classification_report: empty input");

    constexpr int k = 10;
    ConfusionMatrix cm;
    for (auto t : ccs::kAllTypes) cm.labels.emplace_back(ccs::to_string(t));
    cm.counts.assign(k, std::vector<long>(k, 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        cm.counts[static_cast<int>(gold[i])][static_cast<int>(pred[i])]++;
    }
    cm.total = static_cast<long>(gold.size());

    ClassificationReport rep;
    long trace = 0;
    for (int c = 0; c < k; ++c) {
        long tp = cm.counts[c][c];
        trace += tp;
        long gold_c = 0, pred_c = 0;
        for (int j = 0; j < k; ++j) {
            gold_c += cm.counts[c][j];
            pred_c += cm.counts[j][c];
        }
        PerClassScores s;
        s.precision = pred_c > 0 ? double(tp) / double(pred_c) : 0.0;
        s.recall = gold_c > 0 ? double(tp) / double(gold_c) : 0.0;
        s.f1 = (s.precision + s.recall) > 0
                   ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
                   : 0.0;
        rep.per_class[cm.labels[c]] = s;
        rep.macro_precision += s.precision / k;
        rep.macro_recall += s.recall / k;
        rep.macro_f1 += s.f1 / k;
    }
    rep.accuracy = double(trace) / double(cm.total);
    return {cm, rep};
}

double bleu(const std::string& candidate, const std::vector<std::string>& references,
            int max_n) {
    auto cand = metric_tokens(candidate);
    if (cand.empty() || references.empty()) return 0.0;

    std::vector<std::vector<std::string>> refs;
    for (const auto& r : references) refs.push_back(metric_tokens(r));

    // Closest reference length; ties resolved toward the shorter reference.
    std::size_t c = cand.size();
    std::size_t r = refs[0].size();
    for (const auto& ref : refs) {
        auto d_new = ref.size() > c ? ref.size() - c : c - ref.size();
        auto d_old = r > c ? r - c : c - r;
        if (d_new < d_old || (d_new == d_old && ref.size() < r)) r = ref.size();
    }

    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        std::unordered_map<std::string, long> cand_ngrams, max_ref_ngrams;
        auto collect = [n](const std::vector<std::string>& toks,
                           std::unordered_map<std::string, long>& into) {
            if (toks.size() < static_cast<std::size_t>(n)) return;
            for (std::size_t i = 0; i + n <= toks.size(); ++i) {
                std::string key;
                for (int j = 0; j < n; ++j) {
                    if (j) key += '\x1f';
                    key += toks[i + j];
                }
                into[key]++;
            }
        };
        collect(cand, cand_ngrams);
        for (const auto& ref : refs) {
            std::unordered_map<std::string, long> rn;
            collect(ref, rn);
            for (const auto& [key, cnt] : rn) {
                auto& m = max_ref_ngrams[key];
                m = std::max(m, cnt);
            }
        }
        long total = 0, clipped = 0;
        for (const auto& [key, cnt] : cand_ngrams) {
            total += cnt;
            auto it = max_ref_ngrams.find(key);
            if (it != max_ref_ngrams.end()) clipped += std::min(cnt, it->second);
        }
        double p;
        if (n == 1) {
            if (clipped == 0) return 0.0;
            p = double(clipped) / double(total);
        } else {
            p = double(clipped + 1) / double(total + 1);
        }
        log_sum += std::log(p) / max_n;
    }
    double bp = c >= r ? 1.0 : std::exp(1.0 - double(r) / double(c));
    return 100.0 * bp * std::exp(log_sum);
}

double rouge_l(const std::string& candidate, const std::string& reference, double beta) {
    auto cand = metric_tokens(candidate);
    auto ref = metric_tokens(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    std::vector<std::vector<int>> lcs(cand.size() + 1, std::vector<int>(ref.size() + 1, 0));
    for (std::size_t i = 1; i <= cand.size(); ++i) {
        for (std::size_t j = 1; j <= ref.size(); ++j) {
            lcs[i][j] = cand[i - 1] == ref[j - 1]
                            ? lcs[i - 1][j - 1] + 1
                            : std::max(lcs[i - 1][j], lcs[i][j - 1]);
        }
    }
    double l = lcs[cand.size()][ref.size()];
    if (l == 0) return 0.0;
    double p = l / double(cand.size());
    double r = l / double(ref.size());
    double b2 = beta * beta;
    return (1.0 + b2) * p * r / (r + b2 * p);
}

double meteor(const std::string& candidate, const std::string& reference) {
    auto cand = metric_tokens(candidate);
    auto ref = metric_tokens(reference);
    if (cand.empty() || ref.empty()) return 0.0;

    // match[i] = index into ref, or -1
    std::vector<int> match(cand.size(), -1);
    std::vector<bool> ref_used(ref.size(), false);

    auto align = [&](auto key) {
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (match[i] >= 0) continue;
            auto ck = key(cand[i]);
            for (std::size_t j = 0; j < ref.size(); ++j) {
                if (ref_used[j]) continue;
                if (ck == key(ref[j])) {
                    match[i] = static_cast<int>(j);
                    ref_used[j] = true;
                    break;
                }
            }
        }
    };
    align([](const std::string& w) { return w; });
    align([](const std::string& w) { return porter_stem(w); });

    long m = 0;
    for (int j : match)
        if (j >= 0) ++m;
    if (m == 0) return 0.0;

    // Chunks: maximal runs contiguous in both candidate and reference order.
    long chunks = 0;
    int prev_cand = -2, prev_ref = -2;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (match[i] < 0) continue;
        if (static_cast<int>(i) != prev_cand + 1 || match[i] != prev_ref + 1) ++chunks;
        prev_cand = static_cast<int>(i);
        prev_ref = match[i];
    }

    double p = double(m) / double(cand.size());
    double r = double(m) / double(ref.size());
    double fmean = 10.0 * p * r / (r + 9.0 * p);
    double frag = double(chunks) / double(m);
    double penalty = 0.5 * frag * frag * frag;
    return fmean * (1.0 - penalty);
}

AgreementReport cohen_kappa(const std::vector<std::string>& a,
                            const std::vector<std::string>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cohen_kappa: length mismatch");
    if (a.empty()) throw std::invalid_argument("cohen_kappa: empty input");

    double n = double(a.size());
    std::unordered_map<std::string, long> ma, mb;
    long agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma[a[i]]++;
        mb[b[i]]++;
        if (a[i] == b[i]) ++agree;
    }
    double po = double(agree) / n;
    double pe = 0.0;
    for (const auto& [label, ca] : ma) {
        auto it = mb.find(label);
        if (it != mb.end()) pe += (double(ca) / n) * (double(it->second) / n);
    }

    AgreementReport rep;
    rep.observed_agreement = po;
    rep.expected_agreement = pe;
    if (pe >= 1.0 - 1e-12) {
        if (a == b) {
            rep.kappa = 1.0;
            return rep;
        }
        throw std::domain_error("cohen_kappa: expected agreement is 1 with disagreement");
    }
    rep.kappa = (po - pe) / (1.0 - pe);
    return rep;
}

AgreementReport pairwise_kappa(const std::vector<std::vector<std::string>>& raters) {
    if (raters.size() < 2) throw std::invalid_argument("pairwise_kappa: need >= 2 raters");
    std::vector<double> kappas;
    for (std::size_t i = 0; i < raters.size(); ++i) {
        for (std::size_t j = i + 1; j < raters.size(); ++j) {
            kappas.push_back(cohen_kappa(raters[i], raters[j]).kappa);
        }
    }
    AgreementReport rep;
    double sum = 0.0;
    for (double k : kappas) sum += k;
    rep.pairwise_mean = sum / double(kappas.size());
    rep.kappa = *rep.pairwise_mean;
    rep.pairwise_kappas = std::move(kappas);
    return rep;
}

double sign_test_one_sided(long wins, long losses) {
    if (wins < 0 || losses < 0 || wins + losses < 1)
        throw std::invalid_argument("sign_test: need wins + losses >= 1");
    long n = wins + losses;
    long m = std::min(wins, losses);
    long double coeff = 1.0L; // C(n, 0)
    long double sum = 0.0L;
    for (long i = 0; i <= m; ++i) {
        sum += coeff;
        coeff = coeff * (long double)(n - i) / (long double)(i + 1);
    }
    long double p = sum * std::pow(0.5L, (long double)n);
    return static_cast<double>(std::min(p, (long double)1.0));
}

double sign_test_two_sided(long wins, long losses) {
    return std::min(1.0, 2.0 * sign_test_one_sided(wins, losses));
}

// ---------------------------------------------------------------------------
// Porter stemmer (M. F. Porter, 1980), string-based port of the reference
// algorithm.

namespace {

class PorterStemmer {
  public:
    std::string stem(std::string word) {
        b_ = std::move(word);
        k_ = static_cast<int>(b_.size()) - 1;
        if (k_ <= 1) return b_;
        step1ab();
        step1c();
        step2();
        step3();
        step4();
        step5();
        b_.resize(k_ + 1);
        return b_;
    }

  private:
    std::string b_;
    int k_ = 0;
    int j_ = 0;

    bool cons(int i) const {
        switch (b_[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return false;
        case 'y': return i == 0 ? true : !cons(i - 1);
        default: return true;
        }
    }

    int m() const {
        int n = 0, i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool doublec(int j) const {
        if (j < 1) return false;
        if (b_[j] != b_[j - 1]) return false;
        return cons(j);
    }

    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b_[i];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        if (len > k_ + 1) return false;
        if (std::memcmp(b_.data() + k_ - len + 1, s, len) != 0) return false;
        j_ = k_ - len;
        return true;
    }

    void setto(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        b_.resize(j_ + 1);
        b_.append(s, len);
        k_ = j_ + len;
    }

    void r(const char* s) {
        if (m() > 0) setto(s);
    }

    void step1ab() {
        if (b_[k_] == 's') {
            if (ends("sses")) k_ -= 2;
            else if (ends("ies")) setto("i");
            else if (b_[k_ - 1] != 's') --k_;
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) setto("ate");
            else if (ends("bl")) setto("ble");
            else if (ends("iz")) setto("ize");
            else if (doublec(k_)) {
                --k_;
                char ch = b_[k_];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (m() == 1 && cvc(k_)) {
                setto("e");
            }
        }
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
    }

    void step2() {
        switch (b_[k_ - 1]) {
        case 'a':
            if (ends("ational")) { r("ate"); break; }
            if (ends("tional")) { r("tion"); break; }
            break;
        case 'c':
            if (ends("enci")) { r("ence"); break; }
            if (ends("anci")) { r("ance"); break; }
            break;
        case 'e':
            if (ends("izer")) { r("ize"); break; }
            break;
        case 'l':
            if (ends("bli")) { r("ble"); break; }
            if (ends("alli")) { r("al"); break; }
            if (ends("entli")) { r("ent"); break; }
            if (ends("eli")) { r("e"); break; }
            if (ends("ousli")) { r("ous"); break; }
            break;
        case 'o':
            if (ends("ization")) { r("ize"); break; }
            if (ends("ation")) { r("ate"); break; }
            if (ends("ator")) { r("ate"); break; }
            break;
        case 's':
            if (ends("alism")) { r("al"); break; }
            if (ends("iveness")) { r("ive"); break; }
            if (ends("fulness")) { r("ful"); break; }
            if (ends("ousness")) { r("ous"); break; }
            break;
        case 't':
            if (ends("aliti")) { r("al"); break; }
            if (ends("iviti")) { r("ive"); break; }
            if (ends("biliti")) { r("ble"); break; }
            break;
        case 'g':
            if (ends("logi")) { r("log"); break; }
            break;
        default: break;
        }
    }

    void step3() {
        switch (b_[k_]) {
        case 'e':
            if (ends("icate")) { r("ic"); break; }
            if (ends("ative")) { r(""); break; }
            if (ends("alize")) { r("al"); break; }
            break;
        case 'i':
            if (ends("iciti")) { r("ic"); break; }
            break;
        case 'l':
            if (ends("ical")) { r("ic"); break; }
            if (ends("ful")) { r(""); break; }
            break;
        case 's':
            if (ends("ness")) { r(""); break; }
            break;
        default: break;
        }
    }

    void step4() {
        switch (b_[k_ - 1]) {
        case 'a': if (ends("al")) break; return;
        case 'c': if (ends("ance")) break; if (ends("ence")) break; return;
        case 'e': if (ends("er")) break; return;
        case 'i': if (ends("ic")) break; return;
        case 'l': if (ends("able")) break; if (ends("ible")) break; return;
        case 'n':
            if (ends("ant")) break;
            if (ends("ement")) break;
            if (ends("ment")) break;
            if (ends("ent")) break;
            return;
        case 'o':
            if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) break;
            if (ends("ou")) break;
            return;
        case 's': if (ends("ism")) break; return;
        case 't': if (ends("ate")) break; if (ends("iti")) break; return;
        case 'u': if (ends("ous")) break; return;
        case 'v': if (ends("ive")) break; return;
        case 'z': if (ends("ize")) break; return;
        default: return;
        }
        if (m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (b_[k_] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        if (b_[k_] == 'l' && doublec(k_) && m() > 1) --k_;
    }
};

} // namespace

std::string porter_stem(std::string word) {
    for (char c : word) {
        if (c < 'a' || c > 'z') return word; // non-lowercase-ASCII left as-is
    }
    return PorterStemmer().stem(std::move(word));
}

} // namespace commitforge::metrics
