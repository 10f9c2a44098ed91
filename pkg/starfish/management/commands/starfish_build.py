from starfish.cap_profile import admissibility_margin, thin_part_distance
from starfish.management.base import StarfishCommand
from starfish.serializers import AtlasArtifactSerializer


class Command(StarfishCommand):
    """
    Команда для построения атласа сферы с тремя шапочками.

    Проверяет допустимость rho*, пишет JSON атласа и печатает запас
    log 2 - rho* - 2·arccosh 3.
    """

    help = 'Строит атлас для заданного rho* и печатает запас допустимости'

    def run(self, run_config, **options):
        atlas = self.atlas(run_config)
        margin = admissibility_margin(atlas.rho_star)
        artifact = AtlasArtifactSerializer({
            'rho_star': atlas.rho_star,
            'admissibility_margin': margin,
            'thin_part_distance': thin_part_distance(atlas.rho_star),
            'atlas': atlas.to_dict(),
        }).data
        path = self.reporter.write_json(run_config.output_path('atlas.json'), artifact)
        self.reporter.summary(f'rho_star: {atlas.rho_star:.7f}')
        self.reporter.summary(f'margin: {margin:.7f}')
        self.reporter.summary(f'atlas: {path}')
