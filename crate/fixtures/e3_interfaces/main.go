package main

import "fmt"

type Executor interface {
	Execute()
}

type SafeType struct{}

func (SafeType) Execute() {
	fmt.Println("safe execution")
}

type UnsafeType struct{}

func (*UnsafeType) Execute() {
	fmt.Println("payload would run here")
}

func main() {
	var executor Executor = SafeType{}
	executor.Execute()
	executor = &UnsafeType{}
	executor.Execute()
}
