#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commitforge/ccs.hpp"

namespace commitforge::metrics {

struct ConfusionMatrix {
    std::vector<std::string> labels; // row = gold, column = predicted
    std::vector<std::vector<long>> counts;
    long total = 0;
};

struct PerClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct ClassificationReport {
    std::map<std::string, PerClassScores> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
};

/// Ten-class report over the fixed CommitType label set. Macro metrics are the
/// unweighted mean over all ten classes; a class absent from both gold and
/// pred contributes 0 to precision and recall.
std::pair<ConfusionMatrix, ClassificationReport>
classification_report(const std::vector<ccs::CommitType>& gold,
                      const std::vector<ccs::CommitType>& pred);

/// Sentence BLEU on a 0-100 scale. Geometric mean of modified n-gram
/// precisions for n = 1..max_n times the brevity penalty. Smoothing: add-one
/// to both numerator and denominator for n >= 2; a zero unigram precision
/// yields 0. Tokens are the shared tokenize() rule, lowercased.
double bleu(const std::string& candidate, const std::vector<std::string>& references,
            int max_n = 4);

/// ROUGE-L F-measure in [0,1]: LCS over tokens,
/// F = (1 + beta^2) * P * R / (R + beta^2 * P) with beta = 1.2.
double rouge_l(const std::string& candidate, const std::string& reference,
               double beta = 1.2);

/// METEOR in [0,1]: exact-match stage then Porter-stem stage (no synonym
/// stage); Fmean = 10PR / (R + 9P); fragmentation penalty
/// 0.5 * (chunks / matches)^3.
double meteor(const std::string& candidate, const std::string& reference);

/// Classic Porter (1980) stemmer over a lowercase ASCII word.
std::string porter_stem(std::string word);

struct AgreementReport {
    double kappa = 0.0;
    double observed_agreement = 0.0;
    double expected_agreement = 0.0;
    std::optional<std::vector<double>> pairwise_kappas;
    std::optional<double> pairwise_mean;
};

/// Cohen's kappa between two equal-length label sequences. When expected
/// agreement is 1 (both raters constant on the same label), kappa is defined
/// as 1.0 for identical sequences; any other degenerate case throws.
AgreementReport cohen_kappa(const std::vector<std::string>& a,
                            const std::vector<std::string>& b);

/// Mean pairwise kappa over >= 2 raters.
AgreementReport pairwise_kappa(const std::vector<std::vector<std::string>>& raters);

/// Exact one-sided binomial sign test (ties excluded by the caller):
/// p = sum_{i=0}^{min(w,l)} C(n,i) / 2^n with n = w + l.
double sign_test_one_sided(long wins, long losses);

/// min(1, 2 * one-sided p).
double sign_test_two_sided(long wins, long losses);

} // namespace commitforge::metrics
