#pragma once

#include <cstdint>
#include <vector>

#include "rlops/mdp.hpp"
#include "rlops/rng.hpp"

namespace rlops {

struct TabularStep {
    std::int64_t next_state = 0;
    double reward = 0.0;
    bool terminal = false;
    bool truncated = false;
};

/// Episodic environment over discrete state indices, the surface every
/// sample-based learner drives. An instance is an independent state
/// machine: one instance per learner run, never shared.
class TabularEnv {
public:
    virtual ~TabularEnv() = default;
    virtual std::int64_t n_states() const = 0;
    virtual int n_actions() const = 0;
    /// Starts a new episode; randomness is drawn from the caller's stream.
    virtual std::int64_t reset(SplitMix64& rng) = 0;
    virtual TabularStep step(int action, SplitMix64& rng) = 0;
};

/// A finite MDP as an episodic environment: transitions sampled from the
/// kernel, episodes end on entering any of the designated terminal states.
/// start_state < 0 draws the start uniformly from non-terminal states.
class MdpEnv final : public TabularEnv {
public:
    MdpEnv(TabularMdp mdp, std::vector<int> terminal_states, int start_state = -1);

    std::int64_t n_states() const override { return mdp_.n_states(); }
    int n_actions() const override { return mdp_.n_actions(); }
    std::int64_t reset(SplitMix64& rng) override;
    TabularStep step(int action, SplitMix64& rng) override;

    const TabularMdp& mdp() const { return mdp_; }
    bool is_terminal(int s) const { return terminal_[static_cast<std::size_t>(s)]; }

private:
    TabularMdp mdp_;
    std::vector<bool> terminal_;
    std::vector<int> non_terminal_;
    int start_state_;
    int state_ = 0;
};

/// The shared two-state fixture in episodic form (s1 terminal, start s0).
MdpEnv two_state_env();

} // namespace rlops
