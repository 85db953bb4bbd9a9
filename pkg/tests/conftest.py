from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    if config._acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(config._acceptance_lines):
            terminalreporter.write_line(line)
