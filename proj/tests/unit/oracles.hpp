#pragma once

// Slow reference implementations shared by unit and acceptance tests.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace testing {

// Top-down memoized recursion straight from the definition.
inline std::size_t edit_oracle(const std::string& a, const std::string& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size()) return b.size() - j;
        if (j == b.size()) return a.size() - i;
        if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
        std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
        best = std::min(best, go(i + 1, j) + 1);
        best = std::min(best, go(i, j + 1) + 1);
        return memo[{i, j}] = best;
    };
    return go(0, 0);
}

// Every substring of a, searched for in b.
inline std::size_t lcs_oracle(const std::string& a, const std::string& b) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t len = 1; i + len <= a.size(); ++len)
            if (b.find(a.substr(i, len)) != std::string::npos) best = std::max(best, len);
    return best;
}

// Left-to-right scan for case-insensitive "CWE-" followed by digits.
inline std::vector<std::string> cwe_scan_oracle(const std::string& s) {
    std::vector<std::string> out;
    auto up = [](char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    std::size_t i = 0;
    while (i + 4 < s.size()) {
        if (up(s[i]) == 'C' && up(s[i + 1]) == 'W' && up(s[i + 2]) == 'E' && s[i + 3] == '-' &&
            digit(s[i + 4])) {
            std::size_t j = i + 4;
            while (j < s.size() && digit(s[j])) ++j;
            const std::string id = "CWE-" + s.substr(i + 4, j - i - 4);
            if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

}  // namespace testing
