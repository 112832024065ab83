import hypothesis

# property examples run grid products that can take a few ms on loaded CI
# machines; wall-clock deadlines would only add flakiness
hypothesis.settings.register_profile("qfrac", deadline=None)
hypothesis.settings.load_profile("qfrac")
