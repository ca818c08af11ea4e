#include "rlops/tabular_env.hpp"

#include <stdexcept>

namespace rlops {

MdpEnv::MdpEnv(TabularMdp mdp, std::vector<int> terminal_states, int start_state)
    : mdp_(std::move(mdp)), start_state_(start_state) {
    terminal_.assign(static_cast<std::size_t>(mdp_.n_states()), false);
    for (int t : terminal_states) {
        if (t < 0 || t >= mdp_.n_states())
            throw std::invalid_argument("MdpEnv: terminal state out of range");
        terminal_[static_cast<std::size_t>(t)] = true;
    }
    for (int s = 0; s < mdp_.n_states(); ++s)
        if (!terminal_[static_cast<std::size_t>(s)]) non_terminal_.push_back(s);
    if (non_terminal_.empty()) throw std::invalid_argument("MdpEnv: every state is terminal");
    if (start_state_ >= mdp_.n_states())
        throw std::invalid_argument("MdpEnv: start state out of range");
    if (start_state_ >= 0 && terminal_[static_cast<std::size_t>(start_state_)])
        throw std::invalid_argument("MdpEnv: start state is terminal");
}

std::int64_t MdpEnv::reset(SplitMix64& rng) {
    state_ = start_state_ >= 0
                 ? start_state_
                 : non_terminal_[static_cast<std::size_t>(rng.uniform_int(
                       static_cast<int>(non_terminal_.size())))];
    return state_;
}

TabularStep MdpEnv::step(int action, SplitMix64& rng) {
    if (action < 0 || action >= mdp_.n_actions())
        throw std::invalid_argument("MdpEnv: invalid action index");
    const double u = rng.next_double();
    auto row = mdp_.transition_row(state_, action);
    int next = mdp_.n_states() - 1;
    double acc = 0.0;
    for (int s2 = 0; s2 < mdp_.n_states(); ++s2) {
        acc += row[s2];
        if (u < acc) {
            next = s2;
            break;
        }
    }
    TabularStep out;
    out.next_state = next;
    out.reward = mdp_.r3(state_, action, next);
    out.terminal = terminal_[static_cast<std::size_t>(next)];
    state_ = next;
    return out;
}

MdpEnv two_state_env() { return MdpEnv(two_state_mdp(), {1}, 0); }

} // namespace rlops
