#include "rlops/mdp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rlops {

namespace {
constexpr double kRowSumTol = 1e-12;

void write_double(std::ostream& out, double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    out.write(buf, ptr - buf);
}
} // namespace

Policy Policy::uniform(int n_states, int n_actions) {
    return Policy(n_states, n_actions,
                  std::vector<double>(static_cast<std::size_t>(n_states) * n_actions,
                                      1.0 / n_actions));
}

Policy Policy::deterministic(const std::vector<int>& actions, int n_actions) {
    const int ns = static_cast<int>(actions.size());
    std::vector<double> p(static_cast<std::size_t>(ns) * n_actions, 0.0);
    for (int s = 0; s < ns; ++s) {
        if (actions[s] < 0 || actions[s] >= n_actions)
            throw std::invalid_argument("Policy::deterministic: action index out of range");
        p[static_cast<std::size_t>(s) * n_actions + actions[s]] = 1.0;
    }
    return Policy(ns, n_actions, std::move(p));
}

int Policy::action(int s) const {
    auto r = row(s);
    return static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
}

TabularMdp::TabularMdp(int n_states, int n_actions, std::vector<double> transition,
                       std::vector<double> reward, double discount)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      discount_(discount) {
    const std::size_t expect = static_cast<std::size_t>(n_states) * n_actions * n_states;
    if (transition_.size() != expect || reward_.size() != expect)
        throw std::invalid_argument("TabularMdp: tensor sizes do not match (n_states, n_actions)");
    reward_sa_.assign(static_cast<std::size_t>(n_states) * n_actions, 0.0);
    for (int s = 0; s < n_states_; ++s) {
        for (int a = 0; a < n_actions_; ++a) {
            double acc = 0.0;
            for (int s2 = 0; s2 < n_states_; ++s2) acc += p(s, a, s2) * r3(s, a, s2);
            reward_sa_[static_cast<std::size_t>(s) * n_actions_ + a] = acc;
        }
    }
    r_max_ = 0.0;
    for (double r : reward_) r_max_ = std::max(r_max_, std::abs(r));
}

double sup_norm(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(x));
    return m;
}

double sup_norm(const StateValueFn& v) { return sup_norm(std::span<const double>(v.values)); }
double sup_norm(const ActionValueFn& q) { return sup_norm(std::span<const double>(q.values)); }

namespace {
double sup_distance_spans(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("sup_distance: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
} // namespace

double sup_distance(const StateValueFn& a, const StateValueFn& b) {
    return sup_distance_spans(a.values, b.values);
}
double sup_distance(const ActionValueFn& a, const ActionValueFn& b) {
    return sup_distance_spans(a.values, b.values);
}
double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    return sup_distance_spans(a, b);
}

namespace {
bool all_finite(std::span<const double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}
} // namespace

bool is_finite(const StateValueFn& v) { return all_finite(v.values); }
bool is_finite(const ActionValueFn& q) { return all_finite(q.values); }
bool is_finite(const std::vector<double>& xs) { return all_finite(xs); }
bool is_finite(double x) { return std::isfinite(x); }

std::vector<MdpViolation> validate_mdp(const TabularMdp& mdp) {
    std::vector<MdpViolation> out;
    if (mdp.n_states() < 1 || mdp.n_actions() < 1) {
        out.push_back({-1, -1, "n_states and n_actions must be positive"});
        return out;
    }
    if (!(mdp.discount() >= 0.0 && mdp.discount() < 1.0))
        out.push_back({-1, -1, "discount must lie in [0, 1)"});
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            double sum = 0.0;
            bool entry_ok = true;
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
                const double pr = mdp.p(s, a, s2);
                if (!(pr >= 0.0 && pr <= 1.0)) entry_ok = false;
                sum += pr;
                if (!std::isfinite(mdp.r3(s, a, s2)))
                    out.push_back({s, a, "reward entry not finite"});
            }
            if (!entry_ok) out.push_back({s, a, "transition entry outside [0, 1]"});
            if (std::abs(sum - 1.0) > kRowSumTol)
                out.push_back({s, a, "transition row does not sum to 1"});
        }
    }
    return out;
}

TabularMdp random_mdp(int n_states, int n_actions, double discount, std::uint64_t seed) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("random_mdp: dimensions must be positive");
    if (!(discount >= 0.0 && discount < 1.0))
        throw std::invalid_argument("random_mdp: discount must lie in [0, 1)");
    SplitMix64 rng(seed);
    const std::size_t n3 = static_cast<std::size_t>(n_states) * n_actions * n_states;
    std::vector<double> transition(n3), reward(n3);
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            const std::size_t base = (static_cast<std::size_t>(s) * n_actions + a) * n_states;
            double sum = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) {
                // Strictly positive draws keep the normalized row well defined.
                const double u = rng.next_double() + 1e-12;
                transition[base + s2] = u;
                sum += u;
            }
            for (int s2 = 0; s2 < n_states; ++s2) transition[base + s2] /= sum;
            for (int s2 = 0; s2 < n_states; ++s2) reward[base + s2] = rng.uniform(-1.0, 1.0);
        }
    }
    if (n_states == 1)
        for (std::size_t i = 0; i < n3; ++i) transition[i] = 1.0;
    return TabularMdp(n_states, n_actions, std::move(transition), std::move(reward), discount);
}

double discounted_return(std::span<const double> rewards, double discount) {
    if (!(discount >= 0.0 && discount < 1.0))
        throw std::invalid_argument("discounted_return: discount must lie in [0, 1)");
    double acc = 0.0;
    double w = 1.0;
    for (double r : rewards) {
        if (!std::isfinite(r)) throw std::invalid_argument("discounted_return: non-finite reward");
        acc += w * r;
        w *= discount;
    }
    return acc;
}

StateValueFn state_values_from_q(const ActionValueFn& q, const Policy& policy) {
    if (q.n_states != policy.n_states || q.n_actions != policy.n_actions)
        throw std::invalid_argument("state_values_from_q: shape mismatch");
    StateValueFn v = StateValueFn::zeros(q.n_states);
    for (int s = 0; s < q.n_states; ++s) {
        double acc = 0.0;
        for (int a = 0; a < q.n_actions; ++a) acc += policy.at(s, a) * q.at(s, a);
        v[s] = acc;
    }
    return v;
}

std::vector<int> greedy_actions(const ActionValueFn& q) {
    std::vector<int> actions(q.n_states);
    for (int s = 0; s < q.n_states; ++s) {
        auto row = q.row(s);
        // max_element returns the first maximizer: lowest index wins ties.
        actions[s] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return actions;
}

Policy greedy_policy(const ActionValueFn& q) {
    return Policy::deterministic(greedy_actions(q), q.n_actions);
}

TabularMdp two_state_mdp() {
    const int ns = 2, na = 2;
    std::vector<double> p(ns * na * ns, 0.0), r(ns * na * ns, 0.0);
    auto at = [&](int s, int a, int s2) { return (s * na + a) * ns + s2; };
    p[at(0, 0, 0)] = 1.0;                     // s0, a0: self-loop, reward 0
    p[at(0, 1, 1)] = 1.0; r[at(0, 1, 1)] = 1.0; // s0, a1: to s1, reward 1
    p[at(1, 0, 1)] = 1.0;                     // s1 absorbing under both actions
    p[at(1, 1, 1)] = 1.0;
    return TabularMdp(ns, na, std::move(p), std::move(r), 0.5);
}

namespace {
[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    throw std::runtime_error("mdp file, line " + std::to_string(line_no) + ": " + what);
}
} // namespace

TabularMdp load_mdp(std::istream& in) {
    int n_states = -1, n_actions = -1;
    double gamma = 0.0;
    std::vector<double> transition, reward;
    std::vector<bool> seen;
    std::string line;
    int line_no = 0;
    bool header_done = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!header_done) {
            std::string tag;
            if (!(ls >> tag)) continue; // blank or comment-only line
            if (tag != "mdp") parse_fail(line_no, "expected header 'mdp <n_states> <n_actions> <gamma>'");
            if (!(ls >> n_states >> n_actions >> gamma))
                parse_fail(line_no, "malformed header");
            if (n_states < 1 || n_actions < 1) parse_fail(line_no, "dimensions must be positive");
            const std::size_t n3 = static_cast<std::size_t>(n_states) * n_actions * n_states;
            transition.assign(n3, 0.0);
            reward.assign(n3, 0.0);
            seen.assign(static_cast<std::size_t>(n_states) * n_actions, false);
            header_done = true;
            continue;
        }
        int s, a;
        if (!(ls >> s)) continue;
        if (!(ls >> a)) parse_fail(line_no, "expected '<s> <a> p... r...'");
        if (s < 0 || s >= n_states || a < 0 || a >= n_actions)
            parse_fail(line_no, "state/action index out of range");
        const std::size_t base = (static_cast<std::size_t>(s) * n_actions + a) * n_states;
        for (int s2 = 0; s2 < n_states; ++s2)
            if (!(ls >> transition[base + s2])) parse_fail(line_no, "missing transition probability");
        for (int s2 = 0; s2 < n_states; ++s2)
            if (!(ls >> reward[base + s2])) parse_fail(line_no, "missing reward entry");
        seen[static_cast<std::size_t>(s) * n_actions + a] = true;
    }
    if (!header_done) throw std::runtime_error("mdp file: missing header");
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i])
            throw std::runtime_error("mdp file: missing line for (s=" +
                                     std::to_string(i / n_actions) + ", a=" +
                                     std::to_string(i % n_actions) + ")");
    return TabularMdp(n_states, n_actions, std::move(transition), std::move(reward), gamma);
}

TabularMdp load_mdp_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mdp file: " + path);
    return load_mdp(in);
}

void save_mdp(const TabularMdp& mdp, std::ostream& out) {
    out << "mdp " << mdp.n_states() << ' ' << mdp.n_actions() << ' ';
    write_double(out, mdp.discount());
    out << '\n';
    for (int s = 0; s < mdp.n_states(); ++s) {
        for (int a = 0; a < mdp.n_actions(); ++a) {
            out << s << ' ' << a << ' ';
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
                out << ' ';
                write_double(out, mdp.p(s, a, s2));
            }
            out << ' ';
            for (int s2 = 0; s2 < mdp.n_states(); ++s2) {
                out << ' ';
                write_double(out, mdp.r3(s, a, s2));
            }
            out << '\n';
        }
    }
}

void save_mdp_file(const TabularMdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write mdp file: " + path);
    save_mdp(mdp, out);
}

} // namespace rlops
