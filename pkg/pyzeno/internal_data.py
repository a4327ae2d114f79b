from importlib import resources

def config_path(experiment):
    """Path to the packaged default config for an experiment"""
    return str(resources.files("pyzeno.internals") / f"{experiment}.json")
