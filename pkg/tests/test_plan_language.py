"""Parsing, validation, and lowering of model completions."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obivoice import plan_language as pl
from support import interpret_reference, plan_as_tuples, random_source


def parse_one(source):
    ast = pl.parse(source)
    assert len(ast.statements) == 1
    return ast.statements[0]


class TestParse:
    def test_direct_call_sequence(self):
        ast = pl.parse("obi.scoop_from_bowlno(1)\nobi.move_to_mouth()")
        assert ast.statements == (
            pl.Call("scoop_from_bowlno", 1),
            pl.Call("move_to_mouth"),
        )

    def test_for_range_with_body(self):
        src = "for i in range(3):\n    obi.scoop_from_bowlno(1)\n    obi.move_to_mouth()\n    time.sleep(4)"
        stmt = parse_one(src)
        assert stmt == pl.ForRange(
            3,
            (pl.Call("scoop_from_bowlno", 1), pl.Call("move_to_mouth"), pl.Sleep(4.0)),
        )

    def test_assignments(self):
        ast = pl.parse("obi.speed = 5\nobi.accel = 2\nobi.deep_scoop = True")
        assert ast.statements == (
            pl.Assign("speed", 5),
            pl.Assign("accel", 2),
            pl.Assign("deep_scoop", True),
        )

    def test_import_forbidden_with_reason(self):
        with pytest.raises(pl.ImportForbidden, match="disallowed import"):
            pl.parse("import os\nobi.move_to_mouth()")

    def test_from_import_forbidden(self):
        with pytest.raises(pl.ImportForbidden):
            pl.parse("from subprocess import run")

    def test_definitions_forbidden(self):
        with pytest.raises(pl.DefinitionForbidden):
            pl.parse("def feed():\n    obi.move_to_mouth()")
        with pytest.raises(pl.DefinitionForbidden):
            pl.parse("class Feeder:\n    pass")

    def test_unknown_obi_function(self):
        with pytest.raises(pl.UnknownCallable):
            pl.parse("obi.throw_bowl(1)")

    def test_non_obi_callables_rejected(self):
        with pytest.raises(pl.UnknownCallable):
            pl.parse("print('hello')")
        with pytest.raises(pl.UnknownCallable):
            pl.parse("os.system('ls')")

    def test_unsupported_statements(self):
        for src in (
            "while True:\n    obi.move_to_mouth()",
            "if True:\n    obi.move_to_mouth()",
            "obi.speed += 1",
            "x = 5",
            "obi.speed = obi.accel",
            "'just a string'",
            "with open('x') as f:\n    pass",
        ):
            with pytest.raises(pl.UnsupportedConstruct):
                pl.parse(src)

    def test_range_must_be_single_int_literal(self):
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("for i in range(2 + 1):\n    obi.move_to_mouth()")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("for i in range(1, 4):\n    obi.move_to_mouth()")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("for i in range(-1):\n    obi.move_to_mouth()")

    def test_loop_nesting_limited_to_two(self):
        two = (
            "for i in range(2):\n"
            "    for j in range(2):\n"
            "        obi.move_to_mouth()"
        )
        assert pl.parse(two)
        three = (
            "for i in range(2):\n"
            "    for j in range(2):\n"
            "        for k in range(2):\n"
            "            obi.move_to_mouth()"
        )
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse(three)

    def test_arity_enforced(self):
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.scoop_from_bowlno()")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.scoop_from_bowlno(1, 2)")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.move_to_mouth(1)")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.scoop_from_bowlno(bowl=1)")

    def test_negative_bowl_parses_for_later_range_check(self):
        assert parse_one("obi.scoop_from_bowlno(-1)") == pl.Call("scoop_from_bowlno", -1)

    def test_sleep_values(self):
        assert parse_one("time.sleep(2.5)") == pl.Sleep(2.5)
        assert parse_one("time.sleep(4)") == pl.Sleep(4.0)
        # millisecond quantization
        assert parse_one("time.sleep(0.12349)") == pl.Sleep(0.123)
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("time.sleep(-3)")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("time.sleep('4')")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("time.sleep()")

    def test_variable_value_types(self):
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.deep_scoop = 3")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.speed = True")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.speed = 'fast'")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("obi.size = 3")

    def test_code_fences_stripped(self):
        fenced = "Here is the code:\n```python\nobi.move_to_mouth()\n```\nEnjoy!"
        assert pl.parse(fenced).statements == (pl.Call("move_to_mouth"),)

    def test_multiple_fences_concatenated(self):
        fenced = "```python\nobi.speed = 5\n```\ntext\n```\nobi.move_to_mouth()\n```"
        ast = pl.parse(fenced)
        assert ast.statements == (pl.Assign("speed", 5), pl.Call("move_to_mouth"))

    def test_empty_and_prose_rejected(self):
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("")
        with pytest.raises(pl.UnsupportedConstruct):
            pl.parse("   \n\n")
        with pytest.raises(pl.PlanSyntaxError):
            pl.parse("I will feed you yogurt now!")

    def test_broken_syntax(self):
        with pytest.raises(pl.PlanSyntaxError):
            pl.parse("obi.scoop_from_bowlno(1")

    @settings(max_examples=300, deadline=None)
    @given(st.text(max_size=200))
    def test_parse_totality_never_executes_or_leaks(self, text):
        try:
            ast = pl.parse(text)
            assert isinstance(ast, pl.Ast)
        except pl.PlanError:
            pass  # exactly the enumerated taxonomy

    def test_random_grammar_legal_sources_always_parse(self):
        rng = random.Random(202)
        for _ in range(300):
            src = random_source(rng, allow_controls=True)
            assert isinstance(pl.parse(src), pl.Ast)


class TestValidate:
    def test_high_level_clamped_with_warning(self):
        ast = pl.parse("obi.speed = 7\nobi.move_to_mouth()")
        checked, warnings = pl.validate(ast)
        assert checked.statements[0] == pl.Assign("speed", 5)
        assert len(warnings) == 1 and "7" in warnings[0]

    def test_negative_level_clamped_to_zero(self):
        checked, warnings = pl.validate(pl.parse("obi.accel = -2\nobi.move_to_mouth()"))
        assert checked.statements[0] == pl.Assign("accel", 0)
        assert warnings

    def test_fractional_level_rounded(self):
        checked, warnings = pl.validate(pl.parse("obi.speed = 3.7\nobi.move_to_mouth()"))
        assert checked.statements[0] == pl.Assign("speed", 4)
        assert warnings

    def test_continuous_mode_clips_to_physical_ceilings(self):
        ast = pl.parse("obi.speed = 100\nobi.accel = 300\nobi.move_to_mouth()")
        checked, warnings = pl.validate(ast, mode=pl.VariableMode.CONTINUOUS)
        assert checked.statements[0] == pl.Assign("speed", 80.0)
        assert checked.statements[1] == pl.Assign("accel", 250.0)
        assert len(warnings) == 2

    def test_continuous_mode_accepts_in_range_values(self):
        ast = pl.parse("obi.speed = 40\nobi.move_to_mouth()")
        checked, warnings = pl.validate(ast, mode=pl.VariableMode.CONTINUOUS)
        assert checked.statements[0] == pl.Assign("speed", 40.0)
        assert warnings == []

    def test_in_range_levels_produce_no_warnings(self):
        _, warnings = pl.validate(pl.parse("obi.speed = 5\nobi.scoop_from_bowlno(2)"))
        assert warnings == []

    def test_bowl_out_of_range(self):
        with pytest.raises(pl.BowlOutOfRange):
            pl.validate(pl.parse("obi.scoop_from_bowlno(5)"))
        with pytest.raises(pl.BowlOutOfRange):
            pl.validate(pl.parse("obi.scrape_down_bowlno(-1)"))

    def test_loop_bound(self):
        with pytest.raises(pl.LoopBoundExceeded):
            pl.validate(pl.parse("for i in range(1000):\n    obi.move_to_mouth()"))
        checked, _ = pl.validate(pl.parse("for i in range(20):\n    obi.move_to_mouth()"))
        assert checked.statements[0].count == 20

    def test_sleep_too_long(self):
        with pytest.raises(pl.SleepTooLong):
            pl.validate(pl.parse("time.sleep(61)"))
        assert pl.validate(pl.parse("time.sleep(60)"))

    def test_plan_too_large_counts_unrolled_steps(self):
        src = "for i in range(20):\n" + "\n".join(
            "    obi.move_to_mouth()" for _ in range(6)
        )
        with pytest.raises(pl.PlanTooLarge):
            pl.validate(pl.parse(src))

    def test_assignments_do_not_count_toward_plan_size(self):
        src = "for i in range(20):\n    obi.speed = 3\n    obi.move_to_mouth()\n    obi.move_to_mouth()\n    obi.move_to_mouth()\n    obi.move_to_mouth()\n    obi.move_to_mouth()"
        checked, _ = pl.validate(pl.parse(src))  # 100 steps exactly
        assert checked

    def test_clamping_idempotent(self):
        rng = random.Random(7)
        for _ in range(200):
            ast = pl.parse(random_source(rng))
            once, warnings1 = pl.validate(ast)
            twice, warnings2 = pl.validate(once)
            assert once == twice
            assert warnings2 == []


class TestScaling:
    @pytest.mark.parametrize(
        "level,expected", [(0, 0.0), (1, 16.0), (2, 32.0), (3, 48.0), (4, 64.0), (5, 80.0)]
    )
    def test_speed_levels(self, level, expected):
        assert pl.scale_to_physical(level, pl.ScaleKind.SPEED) == expected

    @pytest.mark.parametrize(
        "level,expected", [(0, 0.0), (1, 50.0), (2, 100.0), (3, 150.0), (4, 200.0), (5, 250.0)]
    )
    def test_accel_levels(self, level, expected):
        assert pl.scale_to_physical(level, pl.ScaleKind.ACCEL) == expected


class TestLower:
    def lower_source(self, src, mode=pl.VariableMode.LEVELS):
        checked, _ = pl.validate(pl.parse(src), mode=mode)
        return pl.lower(checked, mode=mode)

    def test_scrape_lowers_to_merged_step(self):
        plan = self.lower_source("obi.scrape_down_bowlno(0)\nobi.move_to_mouth()")
        assert isinstance(plan.steps[0], pl.ScrapeThenScoop)
        assert plan.steps[0].bowl == 0
        assert isinstance(plan.steps[1], pl.MoveToMouth)

    def test_loop_unrolled(self):
        plan = self.lower_source(
            "for i in range(3):\n    obi.scoop_from_bowlno(1)\n    obi.move_to_mouth()\n    time.sleep(4)"
        )
        assert len(plan.steps) == 9
        assert [type(s).__name__ for s in plan.steps] == [
            "Scoop", "MoveToMouth", "Wait"] * 3

    def test_defaults_snapshot(self):
        plan = self.lower_source("obi.scoop_from_bowlno(0)")
        step = plan.steps[0]
        assert (step.speed, step.accel, step.deep) == (48.0, 150.0, False)

    def test_assignment_applies_to_following_calls_only(self):
        plan = self.lower_source(
            "obi.scoop_from_bowlno(0)\nobi.speed = 5\nobi.scoop_from_bowlno(0)"
        )
        assert plan.steps[0].speed == 48.0
        assert plan.steps[1].speed == 80.0

    def test_deep_scoop_snapshot(self):
        plan = self.lower_source(
            "obi.deep_scoop = True\nobi.scoop_from_bowlno(2)\nobi.deep_scoop = False\nobi.scrape_down_bowlno(2)"
        )
        assert plan.steps[0].deep is True
        assert plan.steps[1].deep is False

    def test_speed_level_five_reaches_ceiling(self):
        plan = self.lower_source("obi.speed = 5\nobi.scoop_from_bowlno(0)")
        assert plan.steps[0].speed == 80.0

    def test_continuous_mode_values_pass_through(self):
        plan = self.lower_source("obi.speed = 40\nobi.scoop_from_bowlno(0)", pl.VariableMode.CONTINUOUS)
        assert plan.steps[0].speed == 40.0

    def test_controls_lower_to_control_steps(self):
        plan = self.lower_source("obi.stop()\nobi.start()\nobi.pause_indefinitely()")
        assert [s.action for s in plan.steps] == [
            pl.ControlAction.STOP,
            pl.ControlAction.START,
            pl.ControlAction.PAUSE_INDEFINITELY,
        ]

    def test_state_carries_across_commands_when_shared(self):
        state = pl.VariableState.from_defaults(pl.RobotVariableSet())
        checked, _ = pl.validate(pl.parse("obi.speed = 5\nobi.move_to_mouth()"))
        pl.lower(checked, state=state)
        checked2, _ = pl.validate(pl.parse("obi.scoop_from_bowlno(1)"))
        plan2 = pl.lower(checked2, state=state)
        assert plan2.steps[0].speed == 80.0

    def test_loop_homomorphism_matches_explicit_unroll(self):
        rng = random.Random(11)
        for _ in range(100):
            body_src = random_source(rng, max_top_level=3, max_loop_depth=1)
            n = rng.randint(0, 4)
            looped = "for i in range({}):\n".format(n) + "\n".join(
                "    " + line for line in body_src.splitlines()
            )
            unrolled = "\n".join([body_src] * n) if n else "obi.start()"
            looped_plan = self.lower_source(looped)
            unrolled_plan = self.lower_source(unrolled)
            if n == 0:
                assert looped_plan.steps == ()
            else:
                assert looped_plan.steps == unrolled_plan.steps

    def test_matches_reference_interpreter_on_random_programs(self):
        rng = random.Random(13)
        for _ in range(300):
            src = random_source(rng, allow_controls=True)
            ast = pl.parse(src)
            checked, _ = pl.validate(ast)
            plan = pl.lower(checked)
            assert plan_as_tuples(plan) == interpret_reference(ast)

    def test_reference_agreement_in_continuous_mode(self):
        rng = random.Random(17)
        for _ in range(150):
            src = random_source(rng, allow_controls=True)
            ast = pl.parse(src)
            checked, _ = pl.validate(ast, mode=pl.VariableMode.CONTINUOUS)
            plan = pl.lower(checked, mode=pl.VariableMode.CONTINUOUS)
            assert plan_as_tuples(plan) == interpret_reference(ast, mode="continuous")


class TestSafetyClosure:
    def test_closure_over_random_sources(self):
        rng = random.Random(23)
        limits = pl.SafetyLimits()
        for _ in range(500):
            src = random_source(rng, allow_controls=True)
            plan, _ = pl.compile_completion(src)
            for step in plan.steps:
                if isinstance(step, (pl.Scoop, pl.ScrapeThenScoop)):
                    assert 0 <= step.bowl <= 3
                if isinstance(step, (pl.Scoop, pl.ScrapeThenScoop, pl.MoveToMouth)):
                    assert 0.0 <= step.speed <= limits.speed_ceiling
                    assert 0.0 <= step.accel <= limits.accel_ceiling
                if isinstance(step, pl.Wait):
                    assert 0.0 <= step.seconds <= limits.max_sleep_seconds
            assert len(plan.steps) <= limits.max_plan_steps

    def test_speed_ceiling_stays_below_hardware_limit(self):
        assert pl.SafetyLimits().speed_ceiling < pl.HARDWARE_SPEED_LIMIT
        with pytest.raises(ValueError):
            pl.SafetyLimits(speed_ceiling=100.0)


class TestJsonable:
    def test_plan_round_trip_shape(self):
        plan, warnings = pl.compile_completion(
            "obi.deep_scoop = True\nobi.scrape_down_bowlno(1)\nobi.move_to_mouth()\ntime.sleep(4)\nobi.stop()"
        )
        data = pl.plan_to_jsonable(plan)
        assert [d["kind"] for d in data] == [
            "scrape_then_scoop", "move_to_mouth", "wait", "control"]
        assert data[0]["deep"] is True
        assert data[-1]["action"] == "stop"
