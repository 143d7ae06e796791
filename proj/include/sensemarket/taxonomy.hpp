// Copyright 2026 The sensemarket authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sensemarket {

/// Phenomenon vocabulary plus named groups of terms.
///
/// Text format, one entry per line:
///
///     temperature
///     group:environmental-pollution=ph,temperature,humidity,co2
///
/// Blank lines and lines starting with '#' are ignored. Group members must be
/// declared terms and groups must be non-empty; a group may not share a name
/// with a term.
class PhenomenonTaxonomy {
public:
    static PhenomenonTaxonomy parse(std::string_view text);
    static PhenomenonTaxonomy load(const std::filesystem::path& path);
    /// The taxonomy shipped in data/taxonomy.txt.
    static const PhenomenonTaxonomy& builtin();
    static std::string_view builtin_text() noexcept;

    [[nodiscard]] bool has_term(std::string_view term) const;
    [[nodiscard]] bool has_group(std::string_view group) const;
    /// A term expands to itself, a group to its members. Unknown names throw invalid-argument.
    [[nodiscard]] std::set<std::string> expand(std::string_view name) const;

    [[nodiscard]] const std::set<std::string>& terms() const noexcept { return terms_; }
    [[nodiscard]] const std::map<std::string, std::set<std::string>, std::less<>>& groups() const noexcept { return groups_; }

private:
    std::set<std::string, std::less<>> lookup_;
    std::set<std::string> terms_;
    std::map<std::string, std::set<std::string>, std::less<>> groups_;
};

} // namespace sensemarket
