#include "chords/family.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace chords {

namespace {

void normalize(SizeSet& s) {
    std::sort(s.finite.begin(), s.finite.end());
    s.finite.erase(std::unique(s.finite.begin(), s.finite.end()), s.finite.end());
    std::sort(s.bases.begin(), s.bases.end());
    s.bases.erase(std::unique(s.bases.begin(), s.bases.end()), s.bases.end());
    if (s.bases.empty()) s.period = 0;
    for (int v : s.finite)
        if (v < 1) throw std::invalid_argument("size set elements must be positive");
    for (int b : s.bases)
        if (b < 1) throw std::invalid_argument("size set bases must be positive");
    if (!s.bases.empty() && s.period < 1) throw std::invalid_argument("periodic part needs a period");
    // Drop finite elements already covered by the periodic part.
    std::erase_if(s.finite, [&](int v) {
        for (int b : s.bases)
            if (v >= b && (v - b) % s.period == 0) return true;
        return false;
    });
    if (s.finite.empty() && s.bases.empty()) throw std::invalid_argument("size set must be nonempty");
}

std::vector<int> parse_list(const std::string& body) {
    std::vector<int> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" ") == std::string::npos) continue;
        out.push_back(std::stoi(item));
    }
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string s = "{";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

}  // namespace

SizeSet SizeSet::of(std::vector<int> values) {
    SizeSet s;
    s.finite = std::move(values);
    normalize(s);
    return s;
}

SizeSet SizeSet::multiples(int q) {
    SizeSet s;
    s.bases = {q};
    s.period = q;
    normalize(s);
    return s;
}

SizeSet SizeSet::all() { return multiples(1); }

SizeSet SizeSet::parse(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (c != ' ') text += c;
    if (text.empty()) throw std::invalid_argument("empty size set");
    try {
        if (text.back() == '*' || (text.back() == 'N' && text.find('{') == std::string::npos)) {
            std::string q = text.substr(0, text.find('N'));
            return multiples(q.empty() ? 1 : std::stoi(q));
        }
        SizeSet s;
        auto plus = text.find('+');
        std::string fin = text.substr(0, plus);
        if (fin.size() < 2 || fin.front() != '{' || fin.back() != '}') throw std::invalid_argument("bad size set: " + raw);
        s.finite = parse_list(fin.substr(1, fin.size() - 2));
        if (plus != std::string::npos) {
            std::string rest = text.substr(plus + 1);
            auto slash = rest.find('/');
            if (slash == std::string::npos || rest.front() != '{' || rest[slash - 1] != '}')
                throw std::invalid_argument("bad size set: " + raw);
            s.bases = parse_list(rest.substr(1, slash - 2));
            s.period = std::stoi(rest.substr(slash + 1));
        }
        normalize(s);
        return s;
    } catch (const std::logic_error& e) {
        throw std::invalid_argument(std::string("bad size set '") + raw + "': " + e.what());
    }
}

bool SizeSet::contains(int v) const {
    if (v < 1) return false;
    if (std::binary_search(finite.begin(), finite.end(), v)) return true;
    for (int b : bases)
        if (v >= b && (v - b) % period == 0) return true;
    return false;
}

int SizeSet::min() const {
    int m = finite.empty() ? bases.front() : finite.front();
    if (!bases.empty()) m = std::min(m, bases.front());
    return m;
}

int SizeSet::max() const {
    if (!is_finite()) throw std::logic_error("infinite size set has no maximum");
    return finite.back();
}

int SizeSet::gcd() const {
    int g = period;
    for (int v : finite) g = std::gcd(g, v);
    for (int b : bases) g = std::gcd(g, b);
    return g;
}

int SizeSet::min_excluding_one() const {
    // Periodic parts always contain an element above 1, so the loop ends.
    for (int v = 2;; ++v) {
        if (contains(v)) return v;
        if (is_finite() && v > max()) return 0;
    }
}

std::vector<int> SizeSet::elements_up_to(int bound) const {
    std::vector<int> out;
    for (int v = 1; v <= bound; ++v)
        if (contains(v)) out.push_back(v);
    return out;
}

std::string SizeSet::str() const {
    if (finite.empty() && bases.size() == 1 && bases[0] == period)
        return period == 1 ? "N*" : std::to_string(period) + "N*";
    std::string s = join(finite);
    if (!bases.empty()) s += "+" + join(bases) + "/" + std::to_string(period);
    return s;
}

Family Family::parse(const std::string& name, const std::string& sizes) {
    bool restricted = !sizes.empty();
    if (name == "matching" && !restricted) return matching();
    if (name == "diagram" && !restricted) return diagram();
    if (name == "partition") return restricted ? partition(SizeSet::parse(sizes)) : partition();
    if (name == "hyperchord") return restricted ? hyperchord(SizeSet::parse(sizes)) : hyperchord();
    throw std::invalid_argument("unknown family '" + name + (restricted ? "' with sizes" : "'"));
}

std::string Family::name() const {
    switch (tag) {
        case FamilyTag::Matching: return "matching";
        case FamilyTag::Partition:
        case FamilyTag::PartitionRestricted: return "partition";
        case FamilyTag::Diagram: return "diagram";
        default: return "hyperchord";
    }
}

std::string Family::str() const {
    if (tag == FamilyTag::PartitionRestricted || tag == FamilyTag::HyperchordRestricted)
        return name() + "(" + S.str() + ")";
    return name();
}

}  // namespace chords
