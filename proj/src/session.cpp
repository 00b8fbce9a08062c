#include "tsal/session.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "tsal/error.hpp"

namespace tsal::session {

void validate(const ProtocolParams& p) {
  if (p.fps <= 0 || p.duration_frames <= 0 || p.rounds <= 0) {
    throw Error(ErrorCode::InvalidConfig, "fps, duration and rounds must be positive");
  }
  // A zero budget (with a zero cap) is a no-deblur control condition.
  if (p.round_budget_frames < 0 || p.click_cap_frames < 0 ||
      (p.round_budget_frames > 0 && p.click_cap_frames == 0)) {
    throw Error(ErrorCode::InvalidConfig, "budget and click cap must be positive");
  }
  if (p.round_budget_frames > p.duration_frames) {
    throw Error(ErrorCode::InvalidConfig, "round budget exceeds video duration");
  }
  if (p.click_cap_frames > p.round_budget_frames) {
    throw Error(ErrorCode::InvalidConfig, "click cap exceeds round budget");
  }
}

SessionState new_session(const ProtocolParams& p, std::string observer_id, std::string video_id,
                         const SessionOptions& options) {
  validate(p);
  SessionState s;
  s.params = p;
  s.window_radius_px = options.window_radius_px;
  s.budget_remaining = p.round_budget_frames;
  s.click_remaining = p.click_cap_frames;
  s.log.observer_id = std::move(observer_id);
  s.log.video_id = std::move(video_id);
  s.log.config_hash = options.config_hash;
  return s;
}

namespace {

DisplayEffect current_effect(const SessionState& s) {
  if (s.showing_window) return ShowWindow{s.cursor, s.window_radius_px};
  return ShowBlurred{};
}

void tick(SessionState& s) {
  const bool deblurred = s.button_down && s.budget_remaining > 0 && s.click_remaining > 0;
  if (deblurred) {
    --s.budget_remaining;
    --s.click_remaining;
  }
  if (s.frame_index == 0) {
    s.log.rounds.emplace_back();
    s.log.rounds.back().reserve(s.params.duration_frames);
  }
  s.log.rounds.back().push_back(FrameEvent{s.frame_index, s.cursor.x, s.cursor.y, deblurred,
                                           s.button_down ? s.hold_ordinal : 0});
  s.showing_window = deblurred;
  if (++s.frame_index < s.params.duration_frames) return;

  s.frame_index = 0;
  s.button_down = false;
  s.hold_ordinal = 0;
  s.budget_remaining = s.params.round_budget_frames;
  s.click_remaining = s.params.click_cap_frames;
  if (++s.round_index == s.params.rounds) s.finished = true;
}

}  // namespace

Transition handle_event(SessionState state, const InputEvent& event) {
  if (state.finished) {
    throw Error(ErrorCode::SessionFinished, "all rounds have been played");
  }
  std::visit(
      [&state](const auto& e) {
        using E = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<E, CursorMove>) {
          state.cursor = {e.x, e.y};
        } else if constexpr (std::is_same_v<E, Press>) {
          if (!state.button_down) {
            state.button_down = true;
            state.click_remaining = state.params.click_cap_frames;
            ++state.hold_ordinal;
          }
        } else if constexpr (std::is_same_v<E, Release>) {
          state.button_down = false;
        } else {
          tick(state);
        }
      },
      event);
  DisplayEffect effect = current_effect(state);
  return {std::move(state), effect};
}

SessionLog replay(const ProtocolParams& p, const std::vector<InputEvent>& events,
                  const std::string& observer_id, const std::string& video_id) {
  SessionState s = new_session(p, observer_id, video_id);
  for (const InputEvent& e : events) s = handle_event(std::move(s), e).state;
  return std::move(s.log);
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::RoundCount: return "RoundCount";
    case ViolationKind::FrameSequence: return "FrameSequence";
    case ViolationKind::BudgetExceeded: return "BudgetExceeded";
    case ViolationKind::ClickCapExceeded: return "ClickCapExceeded";
    case ViolationKind::HoldSequence: return "HoldSequence";
    case ViolationKind::InvalidCursor: return "InvalidCursor";
    case ViolationKind::Metadata: return "Metadata";
  }
  return "Unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  for (const Violation& v : violations) {
    if (v.kind == kind) return true;
  }
  return false;
}

std::vector<Violation> validate_round(const RoundLog& events, int round_index,
                                      const ProtocolParams& p) {
  std::vector<Violation> out;
  auto report = [&](ViolationKind kind, int frame, std::string detail) {
    out.push_back({kind, round_index, frame, std::move(detail)});
  };

  if (static_cast<int>(events.size()) != p.duration_frames) {
    report(ViolationKind::FrameSequence, -1,
           "expected " + std::to_string(p.duration_frames) + " frame events, got " +
               std::to_string(events.size()));
  }

  struct HoldTally {
    int deblurred = 0;
    bool ended = false;  // a non-deblurred tick was seen inside the hold
    bool cap_reported = false;
  };
  std::map<int, HoldTally> holds;
  int deblurred_total = 0;
  int last_hold = 0;
  int previous_hold = 0;

  for (std::size_t i = 0; i < events.size(); ++i) {
    const FrameEvent& e = events[i];
    const int frame = e.frame_index;
    if (e.frame_index != static_cast<int>(i)) {
      report(ViolationKind::FrameSequence, frame,
             "frame index " + std::to_string(e.frame_index) + " at position " + std::to_string(i));
    }
    if (!std::isfinite(e.cursor_x) || !std::isfinite(e.cursor_y)) {
      report(ViolationKind::InvalidCursor, frame, "cursor coordinates must be finite");
    }
    if (e.hold < 0) {
      report(ViolationKind::HoldSequence, frame, "negative hold ordinal");
    } else if (e.hold > 0) {
      if (e.hold < last_hold || (e.hold == last_hold && previous_hold != e.hold)) {
        report(ViolationKind::HoldSequence, frame,
               "hold " + std::to_string(e.hold) + " does not continue or follow hold " +
                   std::to_string(last_hold));
      }
      last_hold = std::max(last_hold, e.hold);
    }
    previous_hold = e.hold;

    if (!e.deblurred) {
      if (e.hold > 0) holds[e.hold].ended = true;
      continue;
    }
    if (e.hold <= 0) {
      report(ViolationKind::HoldSequence, frame, "deblurred frame without a held button");
    } else {
      HoldTally& tally = holds[e.hold];
      if (tally.ended) {
        report(ViolationKind::HoldSequence, frame, "deblurring resumed within a single hold");
      }
      if (++tally.deblurred > p.click_cap_frames && !tally.cap_reported) {
        tally.cap_reported = true;
        report(ViolationKind::ClickCapExceeded, frame,
               "hold " + std::to_string(e.hold) + " deblurred more than " +
                   std::to_string(p.click_cap_frames) + " frames");
      }
    }
    if (++deblurred_total == p.round_budget_frames + 1) {
      report(ViolationKind::BudgetExceeded, frame,
             "more than " + std::to_string(p.round_budget_frames) + " deblurred frames in round");
    }
  }
  return out;
}

ValidationReport validate_log(const SessionLog& log, const ProtocolParams& p) {
  ValidationReport report;
  if (log.observer_id.empty() || log.video_id.empty()) {
    report.violations.push_back({ViolationKind::Metadata, -1, -1, "missing observer or video id"});
  }
  if (static_cast<int>(log.rounds.size()) != p.rounds) {
    report.violations.push_back({ViolationKind::RoundCount, -1, -1,
                                 "expected " + std::to_string(p.rounds) + " rounds, got " +
                                     std::to_string(log.rounds.size())});
  }
  for (std::size_t r = 0; r < log.rounds.size(); ++r) {
    auto round = validate_round(log.rounds[r], static_cast<int>(r), p);
    report.violations.insert(report.violations.end(), round.begin(), round.end());
  }
  return report;
}

}  // namespace tsal::session
