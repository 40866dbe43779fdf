#include "skillforge/state_aggregation.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace skillforge::model {

namespace {

struct Move {
    std::size_t role;          // index into participating roles
    std::string from;
    std::string to;
    enum Kind { Internal, Send, Receive } kind = Internal;
    std::string signal;
};

} // namespace

bool StateAggregation::contains_local_state(const std::string& role, const std::string& state) const {
    auto it = std::find(roles.begin(), roles.end(), role);
    if (it == roles.end())
        return false;
    std::size_t idx = static_cast<std::size_t>(it - roles.begin());
    return std::any_of(states.begin(), states.end(),
                       [&](const CompositeState& cs) { return cs.local_states[idx] == state; });
}

StateAggregation aggregate_states(const SystemGroupModel& model, std::size_t cap) {
    StateAggregation result;
    std::vector<const StateModel*> machines;
    for (const auto& role : model.roles) {
        if (role.state_model) {
            result.roles.push_back(role.name);
            machines.push_back(&*role.state_model);
        }
    }
    if (machines.empty())
        return result;

    std::vector<Move> moves;
    for (std::size_t i = 0; i < machines.size(); ++i) {
        for (const auto& t : machines[i]->transitions) {
            Move mv{i, t.from, t.to, Move::Internal, ""};
            if (t.trigger && !t.trigger->empty()) {
                if (t.trigger->front() == '!') {
                    mv.kind = Move::Send;
                    mv.signal = t.trigger->substr(1);
                } else {
                    mv.kind = Move::Receive;
                    mv.signal = *t.trigger;
                }
            }
            moves.push_back(std::move(mv));
        }
    }

    CompositeState initial;
    for (const auto* sm : machines)
        initial.local_states.push_back(sm->initial);

    std::set<CompositeState> seen{initial};
    std::deque<CompositeState> queue{initial};
    result.states.push_back(initial);

    auto enqueue = [&](CompositeState next) {
        if (seen.insert(next).second) {
            if (seen.size() > cap)
                throw StateSpaceExceededError(cap);
            result.states.push_back(next);
            queue.push_back(std::move(next));
        }
    };

    while (!queue.empty()) {
        CompositeState current = queue.front();
        queue.pop_front();

        // Independent internal moves.
        for (const auto& mv : moves) {
            if (mv.kind != Move::Internal || current.local_states[mv.role] != mv.from)
                continue;
            CompositeState next = current;
            next.local_states[mv.role] = mv.to;
            enqueue(std::move(next));
        }
        // Pairwise rendezvous: a sender and a receiver of the same signal in
        // two distinct roles advance together.
        for (const auto& send : moves) {
            if (send.kind != Move::Send || current.local_states[send.role] != send.from)
                continue;
            for (const auto& recv : moves) {
                if (recv.kind != Move::Receive || recv.signal != send.signal || recv.role == send.role)
                    continue;
                if (current.local_states[recv.role] != recv.from)
                    continue;
                CompositeState next = current;
                next.local_states[send.role] = send.to;
                next.local_states[recv.role] = recv.to;
                enqueue(std::move(next));
            }
        }
    }
    return result;
}

} // namespace skillforge::model
