from hypothesis import settings

import acceptance_log

# fixed example streams keep runs reproducible; wall-clock deadlines are flaky on loaded machines
settings.register_profile("repo", deadline=None, derandomize=True)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
