import random
import string
from datetime import timedelta

import pytest

from rallypoint import core, messages
from rallypoint.canonical import nfc_length
from rallypoint.core import MissionSpec, Phase
from rallypoint.messages import (
    ACTION_REMINDER,
    KICKOFF,
    SELECTION_ANNOUNCEMENT,
    VOTE_PROMPT,
    Chatter,
    DetailReply,
    IdeaSubmission,
    InboundPost,
    OutboundMessage,
    UnroutablePost,
    VoteByRepost,
    classify,
    compose,
    scrub_for_embed,
    validate_outbound,
)
from rallypoint.timeutil import utc

T0 = utc(2014, 5, 1, 12)
BOT = "@rally"


def park_state(**overrides):
    fields = dict(
        name="Park cleanup",
        rationale="our park deserves better",
        hashtag="#parkday",
        selection_deadline=T0 + timedelta(hours=24),
        execution_time=T0 + timedelta(hours=48),
        creator="haoqi",
    )
    fields.update(overrides)
    state, _ = core.create_mission(MissionSpec(**fields), T0)
    return state


def with_ideas(state, *texts, author_prefix="author"):
    for n, text in enumerate(texts):
        events = core.submit_idea(state, f"{author_prefix}{n}", text,
                                  T0 + timedelta(minutes=n + 1))
        for event in events:
            state = core.apply_event(state, event)
    return state


def post(post_id="p1", author="alice", text="hello #parkday",
         at=T0 + timedelta(minutes=5), repost_of=None, reply_to=None):
    return InboundPost(post_id, author, text, at, repost_of, reply_to)


class TestClassify:
    def test_plain_repost_of_idea_post_is_vote(self):
        state = with_ideas(park_state(), "Pick up litter by the pond!")
        result = classify(
            post(text="RT @author0: Pick up litter by the pond! #parkday",
                 repost_of="src1"),
            state, post_ideas={"src1": "i0001"}, known_posts=frozenset({"src1"}),
            bot_handle=BOT)
        assert result == VoteByRepost("i0001")

    def test_modified_repost_with_same_key_is_vote(self):
        # Oracle: hand-applied canonicalization of the modified text gives
        # "pick up litter by the pond", equal to the idea's key.
        state = with_ideas(park_state(), "Pick up litter by the pond!")
        result = classify(
            post(text="RT @rally: PICK UP LITTER... by the pond!!",
                 repost_of="src1"),
            state, post_ideas={"src1": "i0001"}, known_posts=frozenset({"src1"}),
            bot_handle=BOT)
        assert result == VoteByRepost("i0001")

    def test_modified_repost_with_new_key_is_new_idea(self):
        state = with_ideas(park_state(), "Pick up litter by the pond!")
        result = classify(
            post(text="RT @author0: bring gloves and trash bags",
                 repost_of="src1"),
            state, post_ideas={"src1": "i0001"}, known_posts=frozenset({"src1"}),
            bot_handle=BOT)
        assert isinstance(result, IdeaSubmission)
        assert result.canonical_key == "bring gloves and trash bags"
        assert result.display_text == "bring gloves and trash bags"

    def test_hashtagged_text_during_ideation_is_idea(self):
        state = park_state()
        result = classify(post(text="Plant wildflowers #parkday"), state,
                          post_ideas={}, known_posts=frozenset(), bot_handle=BOT)
        assert result == IdeaSubmission("plant wildflowers",
                                        "Plant wildflowers #parkday")

    def test_reply_to_selection_announcement_is_detail(self):
        state = with_ideas(park_state(), "Pick up litter")
        for event in core.due_transitions(state, T0 + timedelta(hours=25)):
            state = core.apply_event(state, event)
        assert state.phase is Phase.PLANNING
        result = classify(
            post(text="meet at the north gate, 10am #parkday",
                 reply_to="sel-post"),
            state, post_ideas={}, known_posts=frozenset({"sel-post"}),
            selection_post_id="sel-post", bot_handle=BOT)
        assert result == DetailReply("meet at the north gate, 10am #parkday")

    def test_decoration_only_post_is_chatter(self):
        state = park_state()
        result = classify(post(text="#parkday"), state, post_ideas={},
                          known_posts=frozenset(), bot_handle=BOT)
        assert result == Chatter()

    def test_reply_during_planning_to_other_post_is_chatter(self):
        state = with_ideas(park_state(), "Pick up litter")
        for event in core.due_transitions(state, T0 + timedelta(hours=25)):
            state = core.apply_event(state, event)
        result = classify(
            post(text="sounds great #parkday", reply_to="some-other"),
            state, post_ideas={}, known_posts=frozenset({"some-other"}),
            selection_post_id="sel-post", bot_handle=BOT)
        assert result == Chatter()

    def test_unroutable_post_rejected(self):
        state = park_state()
        with pytest.raises(UnroutablePost):
            classify(post(text="nothing relevant"), state, post_ideas={},
                     known_posts=frozenset(), bot_handle=BOT)

    def test_quote_of_bot_post_without_additions_is_chatter(self):
        state = park_state()
        kickoff = compose(KICKOFF, state)[0]
        result = classify(
            post(text=f"RT {BOT}: {kickoff.text}", repost_of="k1"),
            state, post_ideas={}, known_posts=frozenset({"k1"}),
            bot_handle=BOT, outbound_texts={"k1": kickoff.text})
        assert result == Chatter()


class TestCompose:
    def test_kickoff_golden(self):
        text = compose(KICKOFF, park_state())[0].text
        assert text == ("Park cleanup #parkday idea: our park deserves "
                        "better suggest by 2014-05-02 12:00 UTC")
        assert nfc_length(text) <= 140

    def test_selection_announcement_golden(self):
        state = with_ideas(park_state(), "Pick up litter by the pond!")
        for event in core.due_transitions(state, T0 + timedelta(hours=25)):
            state = core.apply_event(state, event)
        text = compose(SELECTION_ANNOUNCEMENT, state)[0].text
        assert text == ("plan: Pick up litter by the pond! #parkday "
                        "reply with details")

    def test_action_reminder_golden(self):
        state = with_ideas(park_state(), "Pick up litter by the pond!")
        for event in core.due_transitions(state, T0 + timedelta(hours=25)):
            state = core.apply_event(state, event)
        text = compose(ACTION_REMINDER, state)[0].text
        assert text == ("go: Pick up litter by the pond! at "
                        "2014-05-03 12:00 UTC #parkday")

    def test_vote_prompt_combines_when_short(self):
        state = with_ideas(park_state(), "litter", "weeds")
        (msg,) = compose(VOTE_PROMPT, state)
        assert "1) litter" in msg.text and "2) weeds" in msg.text
        validate_outbound(msg, "#parkday")

    def test_vote_prompt_fans_out_when_long(self):
        texts = ["the first grand sweeping proposal " + "x" * 60,
                 "the second grand sweeping proposal " + "y" * 60,
                 "the third grand sweeping proposal " + "z" * 60]
        state = with_ideas(park_state(), *texts)
        prompts = compose(VOTE_PROMPT, state)
        assert len(prompts) == 3
        assert [m.ref for m in prompts] == ["i0001", "i0002", "i0003"]
        for msg in prompts:
            validate_outbound(msg, "#parkday")

    def test_vote_prompt_lists_top_three_by_tally(self):
        state = with_ideas(park_state(), "aa", "bb", "cc", "dd")
        for voter in ("v1", "v2"):
            for event in core.cast_vote(state, voter, "i0004", "favorite", T0):
                state = core.apply_event(state, event)
        (msg,) = compose(VOTE_PROMPT, state)
        assert "1) dd" in msg.text
        assert "dd" in msg.text and "cc" not in msg.text

    def test_long_rationale_truncated_with_ellipsis(self):
        state = park_state(rationale="r" * 200)
        text = compose(KICKOFF, state)[0].text
        assert nfc_length(text) <= 140
        assert "…" in text
        assert "suggest by 2014-05-02 12:00 UTC" in text

    def test_selection_without_winner_refused(self):
        state = with_ideas(park_state(), "litter")
        with pytest.raises(ValueError):
            compose(SELECTION_ANNOUNCEMENT, state)

    def test_user_text_cannot_smuggle_hashtag_or_markers(self):
        state = with_ideas(park_state(),
                           "vote: do it #parkday go: now", )
        for event in core.due_transitions(state, T0 + timedelta(hours=25)):
            state = core.apply_event(state, event)
        for kind in (SELECTION_ANNOUNCEMENT, ACTION_REMINDER):
            (msg,) = compose(kind, state)
            validate_outbound(msg, "#parkday")


class TestScrub:
    def test_removes_hashtag_and_markers(self):
        out = scrub_for_embed("vote: clean up #parkday now", "#parkday")
        assert out == "clean up now"

    def test_keeps_words_containing_marker_letters(self):
        assert scrub_for_embed("logo: keep going", "#parkday") == "logo: keep going"


def _random_spec(rng):
    alphabet = string.ascii_letters + "     "
    name = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 60))).strip() or "m"
    rationale = "".join(
        rng.choice(alphabet + "#:!é❤") for _ in range(rng.randint(0, 200)))
    hashtag = "#" + "".join(
        rng.choice(string.ascii_lowercase + string.digits + "_")
        for _ in range(rng.randint(1, 30)))
    start = T0 + timedelta(minutes=rng.randint(0, 10000))
    selection = start + timedelta(minutes=rng.randint(1, 5000))
    execution = selection + timedelta(minutes=rng.randint(1, 5000))
    return MissionSpec(name=name, rationale=rationale, hashtag=hashtag,
                       selection_deadline=selection, execution_time=execution,
                       creator="c"), start


def test_length_safety_sample():
    # Small-N spot check; the acceptance suite runs the full 10000.
    rng = random.Random(42)
    for _ in range(500):
        spec, start = _random_spec(rng)
        state, _ = core.create_mission(spec, start)
        state = with_ideas(state, "idea " + "x" * rng.randint(0, 150), "second")
        for event in core.due_transitions(state, spec.execution_time):
            state = core.apply_event(state, event)
        for kind, st in ((KICKOFF, state), (VOTE_PROMPT, state),
                         (SELECTION_ANNOUNCEMENT, state),
                         (ACTION_REMINDER, state)):
            for msg in compose(kind, st):
                assert nfc_length(msg.text) <= 140, (kind, spec)
                validate_outbound(msg, spec.hashtag)


def test_uncomposable_when_fixed_tokens_exceed_limit():
    from rallypoint.messages import UncomposableMessage, default_templates
    templates = dict(default_templates())
    templates[KICKOFF] = "w" * 150 + " {hashtag} idea: {rationale}"
    with pytest.raises(UncomposableMessage):
        compose(KICKOFF, park_state(), templates)


def test_validate_outbound_rejects_double_hashtag():
    msg = OutboundMessage(KICKOFF, "x #parkday idea: y #parkday")
    with pytest.raises(ValueError):
        validate_outbound(msg, "#parkday")


def test_validate_outbound_rejects_foreign_marker():
    msg = OutboundMessage(KICKOFF, "x #parkday idea: vote: y")
    with pytest.raises(ValueError):
        validate_outbound(msg, "#parkday")
