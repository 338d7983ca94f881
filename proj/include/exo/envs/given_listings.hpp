#pragma once

// Textual start models for the five tabletop environments, mirrored
// byte-for-byte from data/fixtures/listings/<env>_given.txt. The test
// suite checks the mirror against the files.

namespace exo::given {

inline const char* const coffee_listing = R"EXO(EndogenousProcess-NoOp:
    Parameters: [?robot:robot]
    Conditions at start: []
    Conditions overall: []
    Conditions at end: []
    Add Effects: []
    Delete Effects: []
    Ignore Effects: [JugAboveCup, NotAboveCup]
    Log Strength: 1.0000
    Delay Distribution: ConstantDelay(1.0000)
    Option Spec: NoOp(?robot:robot),

EndogenousProcess-PickJugFromMachine:
    Parameters: [?robot:robot, ?jug:jug, ?machine:coffee_machine]
    Conditions at start: [HandEmpty(?robot:robot), JugInMachine(?jug:jug, ?machine:coffee_machine)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Holding(?robot:robot, ?jug:jug)]
    Delete Effects: [HandEmpty(?robot:robot), JugInMachine(?jug:jug, ?machine:coffee_machine)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: PickJug(?robot:robot, ?jug:jug),

EndogenousProcess-PickJugFromTable:
    Parameters: [?robot:robot, ?jug:jug]
    Conditions at start: [HandEmpty(?robot:robot), OnTable(?jug:jug)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Holding(?robot:robot, ?jug:jug)]
    Delete Effects: [HandEmpty(?robot:robot), OnTable(?jug:jug)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: PickJug(?robot:robot, ?jug:jug),

EndogenousProcess-PlaceJugInMachine:
    Parameters: [?robot:robot, ?jug:jug, ?machine:coffee_machine]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), NotAboveCup(?robot:robot, ?jug:jug)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [HandEmpty(?robot:robot), JugInMachine(?jug:jug, ?machine:coffee_machine)]
    Delete Effects: [Holding(?robot:robot, ?jug:jug)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(4.0000, 0.1000)
    Option Spec: PlaceJugInMachine(?robot:robot, ?jug:jug, ?machine:coffee_machine),

EndogenousProcess-PourFromCup:
    Parameters: [?robot:robot, ?jug:jug, ?to_cup:cup, ?from_cup:cup]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), JugAboveCup(?jug:jug, ?from_cup:cup)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [JugAboveCup(?jug:jug, ?to_cup:cup)]
    Delete Effects: [JugAboveCup(?jug:jug, ?from_cup:cup), NotAboveCup(?robot:robot, ?jug:jug)]
    Ignore Effects: [JugAboveCup, NotAboveCup]
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(2.0000, 0.1000)
    Option Spec: Pour(?robot:robot, ?jug:jug, ?to_cup:cup),

EndogenousProcess-PourFromNotAboveCup:
    Parameters: [?robot:robot, ?jug:jug, ?cup:cup]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), NotAboveCup(?robot:robot, ?jug:jug)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [JugAboveCup(?jug:jug, ?cup:cup)]
    Delete Effects: [NotAboveCup(?robot:robot, ?jug:jug)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(2.0000, 0.1000)
    Option Spec: Pour(?robot:robot, ?jug:jug, ?cup:cup),

EndogenousProcess-TurnMachineOn:
    Parameters: [?robot:robot, ?jug:jug, ?machine:coffee_machine]
    Conditions at start: [HandEmpty(?robot:robot), JugInMachine(?jug:jug, ?machine:coffee_machine)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [MachineOn(?machine:coffee_machine)]
    Delete Effects: []
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(2.0000, 0.1000)
    Option Spec: TurnMachineOn(?robot:robot, ?machine:coffee_machine)
)EXO";

inline const char* const grow_listing = R"EXO(EndogenousProcess-NoOp:
    Parameters: [?robot:robot]
    Conditions at start: []
    Conditions overall: []
    Conditions at end: []
    Add Effects: []
    Delete Effects: []
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(1.0000, 0.1000)
    Option Spec: NoOp(?robot:robot),

EndogenousProcess-PickJugFromTable:
    Parameters: [?robot:robot, ?jug:jug]
    Conditions at start: [HandEmpty(?robot:robot), JugOnTable(?jug:jug)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Holding(?robot:robot, ?jug:jug)]
    Delete Effects: [HandEmpty(?robot:robot), JugOnTable(?jug:jug)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: PickJug(?robot:robot, ?jug:jug),

EndogenousProcess-PlaceJugOnTable:
    Parameters: [?robot:robot, ?jug:jug, ?cup:cup]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), JugAboveCup(?jug:jug, ?cup:cup)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [HandEmpty(?robot:robot), JugOnTable(?jug:jug), NotAboveCup(?robot:robot, ?jug:jug)]
    Delete Effects: [Holding(?robot:robot, ?jug:jug), JugAboveCup(?jug:jug, ?cup:cup)]
    Ignore Effects: [HandEmpty, Holding, JugAboveCup, JugOnTable, NotAboveCup]
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: Place(?robot:robot, ?jug:jug),

EndogenousProcess-PourFromAboveCup:
    Parameters: [?robot:robot, ?jug:jug, ?from_cup:cup, ?to_cup:cup]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), JugAboveCup(?jug:jug, ?from_cup:cup)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [JugAboveCup(?jug:jug, ?to_cup:cup)]
    Delete Effects: [JugAboveCup(?jug:jug, ?from_cup:cup)]
    Ignore Effects: [JugAboveCup, NotAboveCup]
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(2.0000, 0.1000)
    Option Spec: Pour(?robot:robot, ?jug:jug, ?to_cup:cup),

EndogenousProcess-PourFromNotAboveCup:
    Parameters: [?robot:robot, ?jug:jug, ?cup:cup]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), NotAboveCup(?robot:robot, ?jug:jug)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [JugAboveCup(?jug:jug, ?cup:cup)]
    Delete Effects: [NotAboveCup(?robot:robot, ?jug:jug)]
    Ignore Effects: [JugAboveCup, NotAboveCup]
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(2.0000, 0.1000)
    Option Spec: Pour(?robot:robot, ?jug:jug, ?cup:cup)
)EXO";

inline const char* const boil_listing = R"EXO(EndogenousProcess-NoOp:
    Parameters: [?robot:robot]
    Conditions at start: []
    Conditions overall: []
    Conditions at end: []
    Add Effects: []
    Delete Effects: []
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: ConstantDelay(1.0000)
    Option Spec: NoOp(?robot:robot),

EndogenousProcess-PickJugFromBurner:
    Parameters: [?robot:robot, ?jug:jug, ?burner:burner]
    Conditions at start: [HandEmpty(?robot:robot), JugAtBurner(?jug:jug, ?burner:burner)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Holding(?robot:robot, ?jug:jug), NoJugAtBurner(?burner:burner)]
    Delete Effects: [HandEmpty(?robot:robot), JugAtBurner(?jug:jug, ?burner:burner)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(4.0000, 0.1000)
    Option Spec: PickJug(?robot:robot, ?jug:jug),

EndogenousProcess-PickJugFromFaucet:
    Parameters: [?robot:robot, ?jug:jug, ?faucet:faucet]
    Conditions at start: [HandEmpty(?robot:robot), JugAtFaucet(?jug:jug, ?faucet:faucet)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Holding(?robot:robot, ?jug:jug), NoJugAtFaucet(?faucet:faucet)]
    Delete Effects: [HandEmpty(?robot:robot), JugAtFaucet(?jug:jug, ?faucet:faucet)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(4.0000, 0.1000)
    Option Spec: PickJug(?robot:robot, ?jug:jug),

EndogenousProcess-PickJugFromOutsideFaucetAndBurner:
    Parameters: [?robot:robot, ?jug:jug]
    Conditions at start: [HandEmpty(?robot:robot), JugNotAtBurnerOrFaucet(?jug:jug)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Holding(?robot:robot, ?jug:jug)]
    Delete Effects: [HandEmpty(?robot:robot), JugNotAtBurnerOrFaucet(?jug:jug)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: PickJug(?robot:robot, ?jug:jug),

EndogenousProcess-PlaceOnBurner:
    Parameters: [?robot:robot, ?jug:jug, ?burner:burner]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), NoJugAtBurner(?burner:burner)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [HandEmpty(?robot:robot), JugAtBurner(?jug:jug, ?burner:burner)]
    Delete Effects: [Holding(?robot:robot, ?jug:jug), NoJugAtBurner(?burner:burner)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(5.0000, 0.1000)
    Option Spec: PlaceOnBurner(?robot:robot, ?burner:burner),

EndogenousProcess-PlaceOutsideFaucetAndBurner:
    Parameters: [?robot:robot, ?jug:jug]
    Conditions at start: [Holding(?robot:robot, ?jug:jug)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [HandEmpty(?robot:robot), JugNotAtBurnerOrFaucet(?jug:jug)]
    Delete Effects: [Holding(?robot:robot, ?jug:jug)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: PlaceOutsideBurnerAndFaucet(?robot:robot),

EndogenousProcess-PlaceUnderFaucet:
    Parameters: [?robot:robot, ?jug:jug, ?faucet:faucet]
    Conditions at start: [Holding(?robot:robot, ?jug:jug), NoJugAtFaucet(?faucet:faucet)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [HandEmpty(?robot:robot), JugAtFaucet(?jug:jug, ?faucet:faucet)]
    Delete Effects: [Holding(?robot:robot, ?jug:jug), NoJugAtFaucet(?faucet:faucet)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: PlaceUnderFaucet(?robot:robot, ?faucet:faucet),

EndogenousProcess-SwitchBurnerOff:
    Parameters: [?robot:robot, ?burner:burner]
    Conditions at start: [BurnerOn(?burner:burner), HandEmpty(?robot:robot)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [BurnerOff(?burner:burner)]
    Delete Effects: [BurnerOn(?burner:burner)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(1.0000, 0.1000)
    Option Spec: SwitchBurnerOff(?robot:robot, ?burner:burner),

EndogenousProcess-SwitchBurnerOn:
    Parameters: [?robot:robot, ?burner:burner]
    Conditions at start: [BurnerOff(?burner:burner), HandEmpty(?robot:robot)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [BurnerOn(?burner:burner)]
    Delete Effects: [BurnerOff(?burner:burner)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: SwitchBurnerOn(?robot:robot, ?burner:burner),

EndogenousProcess-SwitchFaucetOff:
    Parameters: [?robot:robot, ?faucet:faucet]
    Conditions at start: [FaucetOn(?faucet:faucet), HandEmpty(?robot:robot)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [FaucetOff(?faucet:faucet)]
    Delete Effects: [FaucetOn(?faucet:faucet)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(1.0000, 0.1000)
    Option Spec: SwitchFaucetOff(?robot:robot, ?faucet:faucet),

EndogenousProcess-SwitchFaucetOn:
    Parameters: [?robot:robot, ?faucet:faucet]
    Conditions at start: [FaucetOff(?faucet:faucet), HandEmpty(?robot:robot)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [FaucetOn(?faucet:faucet)]
    Delete Effects: [FaucetOff(?faucet:faucet)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(1.0000, 0.1000)
    Option Spec: SwitchFaucetOn(?robot:robot, ?faucet:faucet)
)EXO";

inline const char* const domino_listing = R"EXO(EndogenousProcess-NoOp:
    Parameters: [?robot:robot]
    Conditions at start: []
    Conditions overall: []
    Conditions at end: []
    Add Effects: []
    Delete Effects: []
    Ignore Effects: [AdjacentTo, DominoAtPos, DominoAtRot, PosClear]
    Log Strength: 1.0000
    Delay Distribution: ConstantDelay(1.0000)
    Option Spec: NoOp(?robot:robot),

EndogenousProcess-PickDomino:
    Parameters: [?robot:robot, ?domino:domino, ?pos:loc, ?rot:angle]
    Conditions at start: [DominoAtPos(?domino:domino, ?pos:loc), DominoAtRot(?domino:domino, ?rot:angle), HandEmpty(?robot:robot), MovableBlock(?domino:domino), Upright(?domino:domino)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Holding(?robot:robot, ?domino:domino), PosClear(?pos:loc)]
    Delete Effects: [DominoAtPos(?domino:domino, ?pos:loc), DominoAtRot(?domino:domino, ?rot:angle), HandEmpty(?robot:robot)]
    Ignore Effects: [DominoAtPos, DominoAtRot, PosClear, Tilting, Toppled, Upright]
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(4.0000, 0.1000)
    Option Spec: Pick(?robot:robot, ?domino:domino),

EndogenousProcess-PlaceDomino:
    Parameters: [?robot:robot, ?domino1:domino, ?domino2:domino, ?pos1:loc, ?rot:angle]
    Conditions at start: [AdjacentTo(?pos1:loc, ?domino2:domino), Holding(?robot:robot, ?domino1:domino), PosClear(?pos1:loc), Upright(?domino2:domino)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [DominoAtPos(?domino1:domino, ?pos1:loc), DominoAtRot(?domino1:domino, ?rot:angle), HandEmpty(?robot:robot)]
    Delete Effects: [Holding(?robot:robot, ?domino1:domino), PosClear(?pos1:loc)]
    Ignore Effects: [AdjacentTo, DominoAtPos, DominoAtRot, PosClear, Tilting]
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(3.0000, 0.1000)
    Option Spec: Place(?robot:robot, ?domino1:domino, ?domino2:domino, ?pos1:loc, ?rot:angle),

EndogenousProcess-PushStartBlock:
    Parameters: [?robot:robot, ?domino:domino]
    Conditions at start: [HandEmpty(?robot:robot), InitialBlock(?domino:domino), Upright(?domino:domino)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [Tilting(?domino:domino)]
    Delete Effects: [Upright(?domino:domino)]
    Ignore Effects: [AdjacentTo, DominoAtPos, DominoAtRot, PosClear]
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(1.0000, 0.1000)
    Option Spec: Push(?robot:robot, ?domino:domino)
)EXO";

inline const char* const fan_listing = R"EXO(EndogenousProcess-NoOp:
    Parameters: [?robot:robot]
    Conditions at start: []
    Conditions overall: []
    Conditions at end: []
    Add Effects: []
    Delete Effects: []
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: ConstantDelay(1.0000)
    Option Spec: NoOp(?robot:robot),

EndogenousProcess-TurnFanOff:
    Parameters: [?robot:robot, ?fan:fan]
    Conditions at start: [FanOn(?fan:fan)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [FanOff(?fan:fan)]
    Delete Effects: [FanOn(?fan:fan)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(2.0000, 0.1000)
    Option Spec: SwitchOff(?robot:robot, ?fan:fan),

EndogenousProcess-TurnFanOn:
    Parameters: [?robot:robot, ?fan:fan]
    Conditions at start: [FanOff(?fan:fan)]
    Conditions overall: []
    Conditions at end: []
    Add Effects: [FanOn(?fan:fan)]
    Delete Effects: [FanOff(?fan:fan)]
    Ignore Effects: []
    Log Strength: 1.0000
    Delay Distribution: DiscreteGaussianDelay(2.0000, 0.1000)
    Option Spec: SwitchOn(?robot:robot, ?fan:fan)
)EXO";

}  // namespace exo::given
